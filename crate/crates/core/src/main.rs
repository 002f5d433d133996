fn main() {
    std::process::exit(groupoid_conv::cli::main());
}
