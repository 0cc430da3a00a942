fn main() {
    std::process::exit(metarec::cli::run());
}
