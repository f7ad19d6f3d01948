use clap::Parser;

fn main() {
    let cli = ec_attack_sim::cli::Cli::parse();
    std::process::exit(ec_attack_sim::cli::run(cli));
}
