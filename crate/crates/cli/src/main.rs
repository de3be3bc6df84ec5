use clap::Parser;

fn main() {
    let cli = optoarray_cli::Cli::parse();
    let code = optoarray_cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
