use std::process;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    process::exit(fdbeam_sim::cli::main_with_args(&args));
}
