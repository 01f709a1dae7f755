//! Solving goals over a program with proximity and qualifications.

use sqclp::frontend::{load_program, parse_goal};
use sqclp::sqchl::{solve, PiMode, SearchOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples");
    let goodwork = load_program(&std::fs::read_to_string(format!("{dir}/goodwork.sqclp"))?)
        .map_err(|d| format!("{d:?}"))?;
    let text = "?- goodWork(X)#W | W >= (0.55,30)";
    let goal = parse_goal(text, &goodwork.qdom)?;
    println!("{text}");
    for s in solve(&goodwork, &goal, &SearchOptions::default())? {
        println!("  {s}");
    }

    let routes = load_program(&std::fs::read_to_string(format!("{dir}/routes.sqclp"))?)
        .map_err(|d| format!("{d:?}"))?;
    let goal = parse_goal("?- short(madrid,Y)#W", &routes.qdom)?;
    let collect = SearchOptions {
        pi_mode: PiMode::Collect,
        ..SearchOptions::default()
    };
    println!("short routes, collecting constraints:");
    for s in solve(&routes, &goal, &collect)? {
        println!("  {s}");
    }
    Ok(())
}
