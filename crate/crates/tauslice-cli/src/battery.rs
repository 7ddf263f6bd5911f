//! The `verify all` battery: independent jobs run on a small thread pool,
//! results merged by job id so the report depends only on the seed.

use clap::ValueEnum;
use serde_json::{json, Value};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use tauslice::corpus;
use tauslice::extensions::{beilinson_matrix, orbit_quotient, verify_repetitive, verify_trexs};
use tauslice::iso::{check_iso_certificate, iso_by_ids};
use tauslice::koszul::{global_dimension, GlobalDimension};
use tauslice::mckay::verify_absmc;
use tauslice::present::present;
use tauslice::quiver::BoundQuiver;
use tauslice::separated::{separated_window, special_truncation, window_component_count};
use tauslice::slices::{initial_slice, mutate, random_chain, slice_algebra, Ambient};
use tauslice::stability::{check_stable, verify_duality};
use tauslice::structalg::struct_from_bound;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Small,
    Full,
}

type Check = Box<dyn Fn() -> Result<String, String> + Send + Sync>;

struct Job {
    name: String,
    check: Check,
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn quiver_jobs(name: &str, bq: BoundQuiver, seed: u64) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    let mut push = |kind: &str, check: Check| jobs.push(Job { name: format!("{name}/{kind}"), check });
    let b = bq.clone();
    push(
        "stability",
        Box::new(move || {
            let st = check_stable(&b, None).map_err(s)?;
            verify_duality(&st).map_err(s)?;
            Ok(format!("l = {}", st.l))
        }),
    );
    let b = bq.clone();
    push(
        "components",
        Box::new(move || {
            let amb = Ambient::new(&b, None).map_err(s)?;
            let w = separated_window(&amb.st, 0, 3 * amb.l() as i64);
            let bfs = window_component_count(&w);
            if bfs != amb.comps.d {
                return Err(format!("gcd gives {}, BFS gives {bfs}", amb.comps.d));
            }
            Ok(format!("d = {bfs}"))
        }),
    );
    let b = bq.clone();
    push(
        "beilinson",
        Box::new(move || {
            let st = check_stable(&b, None).map_err(s)?;
            let p = present(&beilinson_matrix(&st)).map_err(s)?;
            let t = special_truncation(&st, None).map_err(s)?;
            let iso = iso_by_ids(&p, &t.bq, st.l).ok_or("presentation and truncation have different quivers")?;
            if !check_iso_certificate(&p, &t.bq, &iso).map_err(s)? {
                return Err("relation ideals differ".into());
            }
            Ok(format!("ideals agree to degree {}", st.l))
        }),
    );
    let b = bq.clone();
    push(
        "orbit",
        Box::new(move || {
            let st = check_stable(&b, None).map_err(s)?;
            let oq = check_stable(&orbit_quotient(&st, 1, None).map_err(s)?.bq, None).map_err(s)?;
            if !oq.is_tau_trivial() {
                return Err("orbit quotient is not weakly symmetric".into());
            }
            Ok("weakly symmetric".into())
        }),
    );
    let b = bq.clone();
    push(
        "repetitive",
        Box::new(move || {
            let amb = Ambient::new(&b, None).map_err(s)?;
            let rep = verify_repetitive(&amb, 2).map_err(s)?;
            if rep.summands != amb.comps.d {
                return Err(format!("{} summands, {} components", rep.summands, amb.comps.d));
            }
            Ok(format!("dimension {}", rep.dimension))
        }),
    );
    let b = bq;
    push(
        "slices",
        Box::new(move || {
            let amb = Ambient::new(&b, None).map_err(s)?;
            let s0 = initial_slice(&amb, 0).map_err(s)?;
            let chain = random_chain(&amb, &s0, 4, seed).map_err(s)?;
            verify_trexs(&amb, &s0, &chain).map_err(s)?;
            let mut cur = s0;
            for m in &chain {
                cur = mutate(&amb, &cur, *m).map_err(s)?;
                let alg = slice_algebra(&amb, &cur).map_err(s)?;
                let a = struct_from_bound(&alg, cur.depth() as usize + 1).map_err(s)?.0;
                if let GlobalDimension::InfiniteWithinCap(c) = global_dimension(&a, 2 * amb.l() + 4) {
                    return Err(format!("slice algebra has a resolution longer than {c}"));
                }
            }
            Ok(format!("{} mutations", chain.len()))
        }),
    );
    jobs
}

fn jobs(suite: Suite, seed: u64) -> Vec<Job> {
    let (quivers, absmc): (Vec<(String, BoundQuiver)>, Vec<(usize, usize)>) = match suite {
        Suite::Small => (corpus::small_battery(), vec![(1, 3), (2, 2), (3, 2)]),
        Suite::Full => (
            corpus::battery(),
            (1..=5).map(|r| (1, r)).chain((1..=3).map(|r| (2, r))).chain((1..=2).map(|r| (3, r))).collect(),
        ),
    };
    let mut out = Vec::new();
    for (k, (name, bq)) in quivers.into_iter().enumerate() {
        out.extend(quiver_jobs(&name, bq, seed.wrapping_add(k as u64)));
    }
    for (m, r) in absmc {
        out.push(Job {
            name: format!("absmc/m{m}_r{r}"),
            check: Box::new(move || {
                let (cert, _, _) = verify_absmc(m, r, 4).map_err(s)?;
                Ok(format!("{} vertices", cert.vertex_count))
            }),
        });
    }
    out
}

pub fn run(suite: Suite, seed: u64) -> Value {
    let jobs = jobs(suite, seed);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<String, String>>>> = Mutex::new(vec![None; jobs.len()]);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(k) else { break };
                let out = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| (job.check)()))
                    .unwrap_or_else(|_| Err("internal error".into()));
                results.lock().unwrap()[k] = Some(out);
            });
        }
    });
    let results = results.into_inner().unwrap();
    let mut failed = 0;
    let entries: Vec<Value> = jobs
        .iter()
        .zip(results)
        .enumerate()
        .map(|(id, (job, out))| match out.expect("every job ran") {
            Ok(detail) => json!({ "id": id, "job": job.name, "pass": true, "detail": detail }),
            Err(why) => {
                failed += 1;
                json!({ "id": id, "job": job.name, "pass": false, "detail": why })
            }
        })
        .collect();
    let suite_name = match suite {
        Suite::Small => "small",
        Suite::Full => "full",
    };
    json!({
        "suite": suite_name,
        "seed": seed,
        "jobs": entries.len(),
        "passed": entries.len() - failed,
        "failed": failed,
        "results": entries,
    })
}
