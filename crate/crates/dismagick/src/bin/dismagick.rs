fn main() {
    std::process::exit(dismagick::cli::run());
}
