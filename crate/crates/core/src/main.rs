fn main() {
    std::process::exit(susy_coherent::cli::run(std::env::args_os()));
}
