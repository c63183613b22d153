use std::io::Write;

fn main() {
    let (code, out) = virtmor_cli::run(std::env::args_os());
    // a closed pipe downstream is not an error of ours
    let _ = if code == 0 {
        writeln!(std::io::stdout(), "{out}")
    } else {
        writeln!(std::io::stderr(), "{out}")
    };
    std::process::exit(code);
}
