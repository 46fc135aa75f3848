use halftime::analysis::{max_two_adic_valuation, verify_min_distance};
use halftime::hasher::SplitMix64;
use halftime::oracle::{
    max_delta_probability, tree_collision_estimate, DeltaProbe, Sampling, Stage, Verdict,
};
use halftime::vectors::{check, parse_file, BUNDLED};
use halftime::{
    hash, hash_reference, ErasureCode, HashParams, NhWidth, SeedBuffer, TransformMatrix, Variant,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Injection {
    /// Check a combine matrix with a singular column pair.
    SingularMatrix,
    /// Check a code whose declared distance is too high.
    WeakCode,
}

pub struct Options {
    pub quick: bool,
    pub inject: Option<Injection>,
}

#[derive(Default)]
struct Log {
    failures: usize,
}

impl Log {
    fn line(&mut self, status: Status, what: &str, detail: impl std::fmt::Display) {
        let tag = match status {
            Status::Ok => "ok  ",
            Status::Warn => "warn",
            Status::Fail => {
                self.failures += 1;
                "FAIL"
            }
        };
        println!("{tag} {what}: {detail}");
    }

    fn check(&mut self, ok: bool, what: &str, detail: impl std::fmt::Display) {
        self.line(if ok { Status::Ok } else { Status::Fail }, what, detail);
    }
}

#[derive(Clone, Copy)]
enum Status {
    Ok,
    Warn,
    Fail,
}

fn width(bits: u32) -> NhWidth {
    NhWidth::new(bits).expect("narrow width is valid")
}

fn matrices(log: &mut Log, inject: Option<Injection>) {
    if inject == Some(Injection::SingularMatrix) {
        let m = TransformMatrix::from_rows(&[[1, 2, 1, 0], [0, 1, 0, 1]]).expect("shape is valid");
        match max_two_adic_valuation(&m, 2) {
            Ok(p) => log.check(true, "matrix (injected)", format!("p={p}")),
            Err(e) => log.check(false, "matrix (injected)", e),
        }
        return;
    }
    for v in Variant::ALL {
        let p = HashParams::of(v);
        match max_two_adic_valuation(p.matrix(), p.k()) {
            Ok(got) => log.check(
                got == p.p(),
                &format!("matrix {v}"),
                format!("p={got}, expected {}", p.p()),
            ),
            Err(e) => log.check(false, &format!("matrix {v}"), e),
        }
    }
}

fn codes(log: &mut Log, inject: Option<Injection>, trials: usize) {
    let mut cases: Vec<(String, ErasureCode)> = Variant::ALL
        .iter()
        .map(|&v| (format!("code {v}"), HashParams::of(v).code().clone()))
        .collect();
    if inject == Some(Injection::WeakCode) {
        let weak = ErasureCode::linear(3, 1, 3, vec![vec![1, 1, 1], vec![1, 1, 1]])
            .expect("shape is valid");
        cases = vec![("code (injected)".into(), weak)];
    }
    for (name, code) in cases {
        match verify_min_distance(&code, code.item_blocks() as u32, trials) {
            Ok(r) => log.check(
                true,
                &name,
                format!("distance {} >= {}", r.min_distance(), r.declared),
            ),
            Err(e) => log.check(false, &name, e),
        }
    }
}

fn nh(log: &mut Log, probes: u64) {
    let stage = Stage::Nh { width: width(4) };
    let mut rng = SplitMix64::new(0x4e48);
    let mut worst = 0f64;
    for i in 0..probes {
        let x = rng.next_u64() & 0xff;
        let y = x ^ (1 + rng.next_u64() % 255);
        match max_delta_probability(
            stage,
            &DeltaProbe::new(vec![x], vec![y]),
            Sampling::Exhaustive { rng_seed: i },
        ) {
            Ok(est) => worst = worst.max(est.probability()),
            Err(e) => return log.check(false, "NH width 4", e),
        }
    }
    log.check(
        worst <= 1.0 / 16.0,
        "NH width 4",
        format!("max Pr {worst:.4} over {probes} probes, bound 0.0625"),
    );
}

fn ehc(log: &mut Log, probes: u64) {
    let m = TransformMatrix::from_rows(&[[1, 0, 1], [0, 1, 4]]).expect("shape is valid");
    let code = ErasureCode::xor_parity(2, 1).expect("shape is valid");
    let params = match HashParams::custom(1, 1, 2, m, code) {
        Ok(p) => p,
        Err(e) => return log.check(false, "EHC width 4", e),
    };
    let bound = 2f64.powi(params.k() as i32 * (params.p() as i32 - 4));
    let stage = Stage::Ehc {
        width: width(4),
        params: &params,
    };
    let mut rng = SplitMix64::new(0x454843);
    let mut worst = 0f64;
    for i in 0..probes {
        let x = vec![rng.next_u64() & 0xff, rng.next_u64() & 0xff];
        let mut y = x.clone();
        y[(i % 2) as usize] ^= 1 + rng.next_u64() % 255;
        match max_delta_probability(
            stage,
            &DeltaProbe::new(x, y),
            Sampling::Exhaustive { rng_seed: i },
        ) {
            Ok(est) => worst = worst.max(est.probability()),
            Err(e) => return log.check(false, "EHC width 4", e),
        }
    }
    log.check(
        worst <= bound,
        "EHC width 4",
        format!("max Pr {worst:.5} over {probes} probes, bound {bound:.5}"),
    );
}

fn tree(log: &mut Log, trials: u64) {
    match tree_collision_estimate(width(4), 2, 2, 1, trials, 0x7472) {
        Ok(est) => {
            let status = match est.verdict {
                Verdict::Pass => Status::Ok,
                Verdict::Inconclusive => Status::Warn,
                Verdict::Fail => Status::Fail,
            };
            log.line(
                status,
                "tree width 4",
                format!(
                    "rate {:.4} (95% CI {:.4}..{:.4}), bound {:.4}",
                    est.rate, est.interval.0, est.interval.1, est.bound
                ),
            );
        }
        Err(e) => log.check(false, "tree width 4", e),
    }
}

fn paths(log: &mut Log, pairs: u64) {
    let mut rng = SplitMix64::new(0x70617468);
    let mut mismatches = 0;
    for i in 0..pairs {
        let p = HashParams::of(Variant::ALL[(i % 4) as usize]);
        let len = (rng.next_u64() % 20_000) as usize;
        let input: Vec<u8> = (0..len).map(|_| rng.next_u64() as u8).collect();
        let master: [u8; 32] = std::array::from_fn(|_| rng.next_u64() as u8);
        let seed = SeedBuffer::for_input_len(&master, &p, len as u64);
        if hash(&input, &seed, &p).ok() != hash_reference(&input, &seed, &p).ok() {
            mismatches += 1;
        }
    }
    log.check(
        mismatches == 0,
        "lane path",
        format!("{mismatches} mismatches in {pairs} inputs"),
    );
}

fn vectors(log: &mut Log) {
    match parse_file(BUNDLED).and_then(|r| check(&r).map(|f| (r.len(), f.len()))) {
        Ok((total, failed)) => log.check(
            failed == 0,
            "test vectors",
            format!("{failed} of {total} failed"),
        ),
        Err(e) => log.check(false, "test vectors", e),
    }
}

/// Runs every check and returns the number of failures.
pub fn run(opts: &Options) -> usize {
    let mut log = Log::default();
    let q = opts.quick;
    matrices(&mut log, opts.inject);
    codes(&mut log, opts.inject, if q { 10_000 } else { 1_000_000 });
    if opts.inject.is_none() {
        nh(&mut log, if q { 20 } else { 110 });
        ehc(&mut log, if q { 5 } else { 100 });
        tree(&mut log, if q { 20_000 } else { 200_000 });
        paths(&mut log, if q { 100 } else { 2_000 });
        vectors(&mut log);
    }
    log.failures
}
