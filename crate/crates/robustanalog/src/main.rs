fn main() {
    std::process::exit(robustanalog::cli::main());
}
