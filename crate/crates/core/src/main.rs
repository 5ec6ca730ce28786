fn main() {
    std::process::exit(interdep_route::cli::run(std::env::args_os()));
}
