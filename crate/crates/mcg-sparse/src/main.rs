fn main() {
    std::process::exit(mcg_sparse::cli::run());
}
