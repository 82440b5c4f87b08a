use std::process::Command;

use epslab::cli::run_command;
use epslab::cyclo::HalfScaled;
use num_complex::Complex64;
use serde_json::Value;

fn run(args: &str) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("epslab").chain(args.split_whitespace());
    let code = run_command(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn eps_prints_exact_and_float_forms() {
    let (code, out, _) = run("eps --p 3 --level 1 --char exps=1;pi=1 --psi canonical");
    assert_eq!(code, 0);
    assert!(out.contains("zeta3 - zeta3^2"), "{out}");
    assert!(out.contains("e_half = -1"), "{out}");
    assert!(out.contains("float = 0+1i"), "{out}");
}

#[test]
fn exact_json_round_trips() {
    for args in [
        "eps --p 3 --level 1 --char exps=1 --json",
        "eps --p 5 --level 2 --char exps=3;pi=zeta6^1 --psi b=v:-1,u:2 --json",
        "gauss --p 7 --level 2 --char exps=5 --json",
        "jacobi --p 5 --level 1 --char exps=1 --json",
    ] {
        let (code, out, err) = run(args);
        assert_eq!(code, 0, "{args}: {err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        let exact = v.get("exact").unwrap_or(&v);
        let h = HalfScaled::from_json(exact).unwrap();
        let f = exact.get("float").or(v.get("float")).unwrap();
        let z = Complex64::new(f["re"].as_f64().unwrap(), f["im"].as_f64().unwrap());
        assert!((h.embed() - z).norm() < 1e-12, "{args}");
        assert_eq!(HalfScaled::from_json(&h.to_json()).unwrap(), h);
    }
}

#[test]
fn verify_vanishing_integral_prints_pass_lines() {
    let (code, out, _) = run("verify vanishing-integral --p 5 --a 2 --m -2..2 --strict-exit");
    assert_eq!(code, 0);
    for m in [-2, -1, 1, 2] {
        assert!(out.contains(&format!("PASS p=5 m={m}: I({m}) = 0")), "{out}");
    }
    assert!(out.contains("PASS p=5 m=0: |I(0)|^2 = q^-a"), "{out}");
    assert!(out.lines().last().unwrap().starts_with("PASS vanishing-integral"));
}

#[test]
fn sweep_counts_and_strict_exit() {
    let (code, out, _) = run("sweep --p 5 --n-max 1 --modes strict --json");
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["counts"]["Case1"], 6);
    assert_eq!(v["counts"]["ExcludedUnramifiedProduct"], 3);
    assert_eq!(v["pairs"], 9);
    // the r = 0 pairs are flagged against the forced Case 2 formula
    let (code, _, _) = run("sweep --p 5 --n-max 1 --modes strict --strict-exit");
    assert_eq!(code, 2);
    let (code, out, _) = run("sweep --p 5 --n-max 1 --modes strict --csv");
    assert_eq!(code, 0);
    assert!(out.lines().count() > 1);
}

#[test]
fn table_rows() {
    let (code, out, _) = run("table --p 3 --n-max 1 --csv");
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3, "{out}");
    assert!(out.contains("0+1i"));
    let (_, out, _) = run("table --p 2 --n-max 1 --json");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
}

#[test]
fn conductor_and_eps_bh() {
    assert_eq!(run("conductor --p 2 --level 3 --char exps=1,0").1.trim(), "2");
    let (code, out, _) = run("eps --p 5 --level 1 --char exps=0;pi=zeta6 --psi b=v:-1,u:1 --s 1+i");
    assert_eq!(code, 0);
    assert!(out.starts_with("eps_BH = "), "{out}");
}

#[test]
fn usage_and_domain_errors_exit_1() {
    let (code, _, err) = run("eps --p 4 --level 1 --char exps=1");
    assert_eq!(code, 1);
    assert!(err.contains("PrimeError"), "{err}");
    let (code, _, err) = run("eps --p 3 --level 1 --char exps=1,1");
    assert_eq!(code, 1);
    assert!(err.contains("ParseError"), "{err}");
    let (code, _, err) = run("gauss --p 5 --level 2 --char exps=1 --m 0");
    assert_eq!(code, 1);
    assert!(err.contains("IllDefinedSumError"), "{err}");
    assert_eq!(run("frobnicate").0, 1);
    assert_eq!(run("verify nope").0, 1);
    assert_eq!(run("--help").0, 0);
}

#[test]
fn scale_guard_needs_force() {
    let (code, _, err) = run("table --p 7 --n-max 6");
    assert_eq!(code, 1);
    assert!(err.contains("ScaleError"), "{err}");
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_epslab"))
        .args(["conductor", "--p", "5", "--level", "2", "--char", "exps=5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1");
}
