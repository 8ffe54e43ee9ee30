use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;
use termtpl_server::{ServerConfig, app};

#[derive(Debug, Parser)]
#[command(name = "termtpl-server", version, about = "HTTP API for termtpl")]
struct Args {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    bind: std::net::IpAddr,
    /// Directory holding the built web front end.
    #[arg(long)]
    web_root: Option<PathBuf>,
    /// Default proof timeout in seconds.
    #[arg(long, default_value_t = 10)]
    timeout: u64,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let cfg = ServerConfig {
        default_timeout: Duration::from_secs(args.timeout),
        web_root: args.web_root,
        ..ServerConfig::default()
    };
    let addr = SocketAddr::new(args.bind, args.port);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{addr}");
    axum::serve(listener, app(cfg)).await
}
