fn main() {
    std::process::exit(weichsel::cli::run(std::env::args_os()));
}
