fn main() {
    std::process::exit(geosub_cli::run());
}
