use clap::Parser;

fn main() {
    let args = twistcube::cli::Args::parse();
    let code = twistcube::cli::main_with(&args, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
