use clap::Parser;

fn main() {
    let cli = holofol_cli::Cli::parse();
    match holofol_cli::run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
