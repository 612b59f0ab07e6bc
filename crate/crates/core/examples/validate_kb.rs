//! Validates a knowledge base given on the command line, or a small
//! broken one if no path is given.

use dune::{parse_kb, validate_kb};

const BROKEN: &str = "\
demon flu {
    accept 50
    reject 60
    leaf fever 30
    group aches { members [headache, myalgia] bonus [10, 5] }
}
demon flu { leaf cough 1 }
";

fn main() {
    let (name, text) = match std::env::args().nth(1) {
        Some(path) => {
            let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
            (path, text)
        }
        None => ("<builtin>".to_string(), BROKEN.to_string()),
    };
    let diagnostics = match parse_kb(&text) {
        Ok(kb) => validate_kb(&kb),
        Err(diags) => diags,
    };
    for d in &diagnostics {
        println!("{name}:{d}");
    }
    println!("{} diagnostic(s)", diagnostics.len());
}
