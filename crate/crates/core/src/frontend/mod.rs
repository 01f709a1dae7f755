//! Concrete syntax, scheme presets, JSON encodings and the command line.

pub mod cli;
pub mod json;
pub mod parser;
pub mod presets;

pub use cli::{cli_main, run_cli};
pub use parser::{
    load_program, parse_goal, parse_program, ParseError, SourceDiagnostic, SourceProgram, Span,
};
pub use presets::Preset;
