//! The expression language used by the command-line tool, driven in-process.

use lcgf::cli::{parse, parse_equation, run_args};

fn main() -> lcgf::Result<()> {
    let e = parse("3*s^(1/2) - 2*s^2 + 1")?;
    println!("parsed : {e:?}");
    println!("printed: {e}");
    println!("{}", parse_equation("y'' + y ~= delta(t - 2*s)")?);

    if let Err(err) = parse("sin(t") {
        println!("error  : {err}");
    }

    for args in [
        vec!["lcgf", "lc-eval", "1/(1 - s)", "--trunc", "4"],
        vec!["lcgf", "laplace", "--inverse", "exp(-2*s*z)/(z^2 + 1)"],
        vec!["lcgf", "solve-ivp", "y'' + y ~= delta(t - 2*s)", "--y0", "0", "--yp0", "1", "--format", "machine"],
        vec!["lcgf", "audit", "y'' + y = delta(t)", "--y0", "0", "--yp0", "1"],
    ] {
        let out = run_args(args);
        print!("{}", out.stdout);
        println!("exit {}\n", out.code);
    }
    Ok(())
}
