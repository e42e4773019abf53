use ordcover::{BF, Real};
fn main() {
    let a = BF::from_f64(1.2345678901234);
    let b = BF::from_f64(0.9876543210987);
    let t0 = std::time::Instant::now();
    let mut x = a.clone();
    for _ in 0..200_000 { x = x.clone() * b.clone(); if x > BF::from_f64(1e10) { x = BF::from_f64(1.5); } }
    println!("mul: {:.1} ns/op ({x:.0?})", t0.elapsed().as_nanos() as f64 / 200_000.0);
    let t0 = std::time::Instant::now();
    let mut s = <BF as num_traits::Zero>::zero();
    for _ in 0..200_000 { s = s + b.clone(); }
    println!("add: {:.1} ns/op", t0.elapsed().as_nanos() as f64 / 200_000.0);
    let t0 = std::time::Instant::now();
    for _ in 0..2_000 { let _ = b.ln(); }
    println!("ln: {:.1} us/op", t0.elapsed().as_micros() as f64 / 2_000.0);
    let t0 = std::time::Instant::now();
    for _ in 0..2_000 { let _ = b.exp(); }
    println!("exp: {:.1} us/op", t0.elapsed().as_micros() as f64 / 2_000.0);
    let t0 = std::time::Instant::now();
    for _ in 0..2_000 { let _ = b.sin(); }
    println!("sin: {:.1} us/op", t0.elapsed().as_micros() as f64 / 2_000.0);
    let t0 = std::time::Instant::now();
    for _ in 0..20_000 { let _ = b.sqrt(); }
    println!("sqrt: {:.1} us/op", t0.elapsed().as_micros() as f64 / 20_000.0);
}
