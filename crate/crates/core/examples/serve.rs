//! Starts the HTTP service on an ephemeral port with both reference
//! knowledge bases preloaded, then stops on Ctrl-C.

use std::sync::Arc;

use dune::fixtures;
use dune::service::{serve, AppState};

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let state = Arc::new(AppState::new());
    for text in [fixtures::KB_RUN1, fixtures::KB_RUN2] {
        let id = state.register_kb(text).expect("fixture is valid");
        println!("kb_id {id}");
    }
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    println!("listening on http://{}", listener.local_addr()?);
    serve(listener, state, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}
