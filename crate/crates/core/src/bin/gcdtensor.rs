fn main() {
    std::process::exit(gcdtensor::cli::run(std::env::args_os()));
}
