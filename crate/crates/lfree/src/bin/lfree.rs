fn main() {
    std::process::exit(lfree::cli::main());
}
