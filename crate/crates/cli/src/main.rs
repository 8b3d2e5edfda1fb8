use clap::Parser;

fn main() {
    let cli = pressure_lab_cli::Cli::parse();
    std::process::exit(pressure_lab_cli::run(&cli));
}
