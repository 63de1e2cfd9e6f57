use sparsecode::cli::{run_cli, USAGE};
use sparsecode::Error;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help" {
        print!("{USAGE}");
        std::process::exit(if args.is_empty() { 2 } else { 0 });
    }
    if args[0] == "--version" {
        println!("sparsecode {}", env!("CARGO_PKG_VERSION"));
        return;
    }
    match run_cli(&args) {
        Ok(out) => {
            println!(
                "wrote {} ({} rows) and {}",
                out.csv_path.display(),
                out.rows,
                out.manifest_path.display()
            );
            if out.violations > 0 {
                eprintln!(
                    "{{\"error\":\"oracle check found {} violation(s)\",\"kind\":\"violation\"}}",
                    out.violations
                );
                std::process::exit(1);
            }
        }
        Err(e) => {
            let (kind, code) = match &e {
                Error::SizeGuard(_) => ("size_guard", 3),
                Error::Config(_) | Error::InvalidParameter(_) | Error::DimensionMismatch(_) => {
                    ("usage", 2)
                }
                _ => ("runtime", 1),
            };
            let msg = e.to_string().replace('"', "'").replace('\n', " ");
            eprintln!("{{\"error\":\"{msg}\",\"kind\":\"{kind}\"}}");
            std::process::exit(code);
        }
    }
}
