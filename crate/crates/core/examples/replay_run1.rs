//! Replays the first reference session and prints every step table
//! followed by the summary matrix.

use dune::render::render_paper_steps;
use dune::{fixtures, render_summary_matrix, replay, KnowledgeBase};

fn main() {
    let kb = KnowledgeBase::parse(fixtures::KB_RUN1).expect("fixture parses");
    let (session, matrix) = replay(kb, &fixtures::run1_features()).expect("fixture is valid");
    print!("{}", render_paper_steps(session.log()));
    println!();
    print!("{}", render_summary_matrix(&matrix));
}
