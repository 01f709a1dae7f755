fn main() {
    std::process::exit(sqclp::frontend::cli_main(std::env::args_os()));
}
