use serde::Serialize;

/// Stable description printed by `version --json`.
#[derive(Debug, Clone, Serialize)]
pub struct VersionInfo {
    pub name: &'static str,
    pub version: &'static str,
    pub library_version: &'static str,
    pub subcommands: [&'static str; 5],
    pub report_columns: [&'static str; 10],
    pub solution_keys: [&'static str; 8],
}

pub fn info() -> VersionInfo {
    VersionInfo {
        name: "loire",
        version: env!("CARGO_PKG_VERSION"),
        library_version: loire::VERSION,
        subcommands: ["regress", "simulate", "bgmodel", "version", "help"],
        report_columns: [
            "method",
            "N",
            "seed",
            "lambda",
            "tol",
            "iterations",
            "DR",
            "Pre",
            "F",
            "wall_time_s",
        ],
        solution_keys: [
            "method",
            "x",
            "b",
            "support",
            "objective_trace",
            "iterations",
            "converged",
            "wall_time_s",
        ],
    }
}
