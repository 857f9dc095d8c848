//! `.eds` documents: parsing, printing, evaluation into the core engine,
//! task execution and reports.

pub mod ast;
pub mod build;
pub mod output;
pub mod printer;
pub mod syntax;
pub mod tasks;

pub use build::{LoadError, LoadOptions, Workspace};
pub use syntax::{parse, ParseError};
pub use tasks::{run_many, run_task, Outcome, RunOptions};

/// Task names selected by `--task`, or the defaults of the root file:
/// its tasks, or its suites when it declares no tasks.
pub fn select(ws: &Workspace, task: Option<&str>) -> Result<(Vec<String>, bool), String> {
    match task {
        Some(t) if ws.tasks.contains_key(t) => Ok((vec![t.to_string()], true)),
        Some(t) => ws.suites.get(t).map(|v| (v.clone(), false)).ok_or_else(|| format!("no task or suite named '{}'", t)),
        None if !ws.root_tasks.is_empty() => Ok((ws.root_tasks.clone(), false)),
        None => {
            let mut names: Vec<String> = Vec::new();
            for t in ws.root_suites.iter().flat_map(|s| ws.suites[s].iter()) {
                if !names.contains(t) {
                    names.push(t.clone());
                }
            }
            Ok((names, false))
        }
    }
}
