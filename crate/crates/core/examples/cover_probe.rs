use ordcover::census::DiskSpec;
use ordcover::criterion::validate_schedule;
use ordcover::curves;
use ordcover::pipeline::{cover_gamma, CoverOptions};
use ordcover::{Real, BF};

fn main() {
    let t0 = std::time::Instant::now();
    let traj = curves::logcurve_at::<BF>(5, 4, true, None).unwrap();
    println!("trajectory: rho = {}, M = {}, t = {:?}", traj.rho().to_f64(), traj.truncation_order(), t0.elapsed());
    let schedule = validate_schedule(5, 1).unwrap();
    println!("schedule a0 = {:?}", schedule.a0);
    let domain = DiskSpec::default_log_domain();
    for t in [3u32, 4, 5] {
        let t1 = std::time::Instant::now();
        match cover_gamma(&traj, &schedule, t, &domain, &CoverOptions::default()) {
            Ok(out) => {
                let r = &out.report;
                println!("T={t}: executed_n={:?} census_in_gamma={} disks={} diam_ln={:.3} contained={} c_count={:.3e} c_diam={:.3} time={:?}",
                    r.executed_n, r.census_in_gamma, r.disk_count, r.total_diameter_ln, r.census_contained, r.realized_c_count, r.realized_c_diameter, t1.elapsed());
                for f in &r.families {
                    println!("  N={} p={} ord={:.4} i_N={} upper={} lower_C={:.3} literal={}",
                        f.n_index, f.p_canonical, f.ord_pn, f.i_n, f.sandwich.upper_holds, f.sandwich.lower_realized_c, f.sandwich.literal_lower_holds);
                }
            }
            Err(e) => println!("T={t}: ERROR {e}"),
        }
    }
    println!("total {:?}", t0.elapsed());
}
