use std::io::Write;

use anyhow::{bail, Result};
use coded_caching::analytics::{
    approx_large_m, approx_small_m, centralized_envelope, certify_gaps, lower_bound_optimal,
    mixture_rate, mixture_weights, rate_centralized, rate_decentralized, rate_shared,
    rate_uncoded, tree_link_rate, GapPeak,
};
use coded_caching::extensions::{
    parse_arrivals_csv, schedule_async, segment_placement, simulate_shared, verify_async_decode,
    verify_shared,
};
use coded_caching::{
    decentralized_place, deliver_limited, route_transcript, verify_all, verify_tree_decode,
    DeliveryChoice, DemandVector, FileStore, SystemParams, TreeNetwork,
};
use rayon::prelude::*;

use crate::args::{
    read_file, AnalyticArgs, AsyncArgs, Cli, Command, DemandMode, GapsArgs, SharedArgs,
    SimulateArgs, TreeArgs,
};
use crate::output::{format_sig, Cell, Format, Table};

/// Runs one command; `Ok(false)` means a verification failed.
pub fn run(cli: &Cli, out: &mut impl Write) -> Result<bool> {
    let format = cli.format;
    match &cli.command {
        Command::Analytic(a) => analytic(a, format, out),
        Command::Simulate(a) => {
            a.system.memory.single()?;
            simulate(a, format, out)
        }
        Command::Sweep(a) => simulate(a, format, out),
        Command::Tree(a) => tree(a, format, out),
        Command::Shared(a) => shared(a, format, out),
        Command::Async(a) => asynchronous(a, format, out),
        Command::Verify(a) => verify(a, format, out),
        Command::Gaps(a) => gaps(a, format, out),
    }
}

fn one_based(demands: &DemandVector) -> String {
    demands
        .as_slice()
        .iter()
        .map(|n| (n + 1).to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn analytic(a: &AnalyticArgs, format: Format, out: &mut impl Write) -> Result<bool> {
    let (n, k) = (a.files, a.users);
    if a.mixture {
        let m = a.memory.single()?;
        let weights = mixture_weights(n, k, m)?;
        let env = centralized_envelope(n, k);
        let mut table = Table::new(&["s", "p_s", "R_C"])
            .meta("N", n)
            .meta("K", k)
            .meta("M", m)
            .meta("R_D", format_sig(rate_decentralized(n, k, m)?))
            .meta("mixture", format_sig(mixture_rate(n, k, m)?));
        for (j, p) in weights.iter().enumerate() {
            let rc = env.eval(n as f64 * j as f64 / k as f64);
            table.push(vec![(j + 1).into(), (*p).into(), rc.into()]);
        }
        table.write(out, format)?;
        return Ok(true);
    }

    let mut columns = vec!["M", "R_U", "R_D", "R_C", "R_star"];
    if a.approx {
        columns.extend(["approx_small", "approx_large"]);
    }
    if a.group_size.is_some() {
        columns.push("R_shared");
    }
    let mut table = Table::new(&columns).meta("N", n).meta("K", k);
    let knee = n as f64 / k as f64;
    for &m in &a.memory.0 {
        let mut row: Vec<Cell> = vec![
            m.into(),
            rate_uncoded(n, k, m)?.into(),
            rate_decentralized(n, k, m)?.into(),
            rate_centralized(n, k, m)?.into(),
            lower_bound_optimal(n, k, m)?.into(),
        ];
        if a.approx {
            let small = if m <= knee { Some(approx_small_m(n, k, m)?) } else { None };
            let large = if m >= knee && m > 0.0 { Some(approx_large_m(n, k, m)?) } else { None };
            row.extend([small.into(), large.into()]);
        }
        if let Some(l) = a.group_size {
            let shared = if l as f64 * m <= n as f64 { Some(rate_shared(n, k, l, m)?) } else { None };
            row.push(shared.into());
        }
        table.push(row);
    }
    table.write(out, format)?;
    Ok(true)
}

struct Trial {
    rate: f64,
    demands: Option<DemandVector>,
}

fn run_trial(a: &SimulateArgs, m: f64, seed: u64) -> Result<Trial> {
    let s = &a.system;
    let params = SystemParams::new(s.files, s.users, m, s.file_bits, seed)?;
    let files = FileStore::generate(&params);
    let caches = decentralized_place(&params)?;
    let choice: DeliveryChoice = a.delivery.into();
    let rate_of = |d: &DemandVector| -> Result<f64> {
        Ok(deliver_limited(&caches, &files, d, &params, choice, a.max_coded_users)?.rate())
    };
    match &a.demands {
        DemandMode::WorstExhaustive => {
            let all = exhaustive_demands(s.files, s.users)?;
            let rates = all.par_iter().map(rate_of).collect::<Result<Vec<f64>>>()?;
            let (best, rate) = rates
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
            Ok(Trial {
                rate,
                demands: Some(all[best].clone()),
            })
        }
        mode => {
            let d = mode.vector(s.files, s.users, seed)?;
            Ok(Trial {
                rate: rate_of(&d)?,
                demands: Some(d),
            })
        }
    }
}

fn exhaustive_demands(n: usize, k: usize) -> Result<Vec<DemandVector>> {
    let total = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if total > coded_caching::delivery::MAX_EXHAUSTIVE {
        bail!("exhaustive search over {n}^{k} demand vectors is too large");
    }
    Ok(DemandVector::all(n, k).collect())
}

fn mean_std(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some(var.sqrt()))
}

fn simulate(a: &SimulateArgs, format: Format, out: &mut impl Write) -> Result<bool> {
    let s = &a.system;
    if a.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let jobs: Vec<(usize, u64)> = (0..s.memory.0.len())
        .flat_map(|i| (0..a.trials).map(move |t| (i, t)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(i, t)| run_trial(a, s.memory.0[i], s.seed.wrapping_add(t)))
        .collect::<Result<Vec<Trial>>>()?;

    let mut table = Table::new(&[
        "M",
        "trials",
        "measured_rate",
        "std_rate",
        "R_D",
        "R_U",
        "demands",
    ])
    .meta("N", s.files)
    .meta("K", s.users)
    .meta("F", s.file_bits)
    .meta("seed", s.seed)
    .meta("delivery", a.delivery.name());
    for (i, chunk) in results.chunks(a.trials as usize).enumerate() {
        let m = s.memory.0[i];
        let rates: Vec<f64> = chunk.iter().map(|t| t.rate).collect();
        let (mean, std) = mean_std(&rates);
        let fixed = matches!(a.demands, DemandMode::Distinct | DemandMode::List(_));
        let worst = matches!(a.demands, DemandMode::WorstExhaustive);
        let demands = if fixed || chunk.len() == 1 {
            chunk[0].demands.as_ref().map(one_based)
        } else if worst {
            chunk
                .iter()
                .max_by(|x, y| x.rate.total_cmp(&y.rate))
                .and_then(|t| t.demands.as_ref().map(one_based))
        } else {
            None
        };
        table.push(vec![
            m.into(),
            a.trials.into(),
            mean.into(),
            std.into(),
            rate_decentralized(s.files, s.users, m)?.into(),
            rate_uncoded(s.files, s.users, m)?.into(),
            demands.map_or(Cell::Empty, Cell::Text),
        ]);
    }
    table.write(out, format)?;
    Ok(true)
}

fn verify(a: &SimulateArgs, format: Format, out: &mut impl Write) -> Result<bool> {
    let s = &a.system;
    let m = s.memory.single()?;
    let params = SystemParams::new(s.files, s.users, m, s.file_bits, s.seed)?;
    let files = FileStore::generate(&params);
    let caches = decentralized_place(&params)?;
    let demands = match &a.demands {
        DemandMode::WorstExhaustive => exhaustive_demands(s.files, s.users)?,
        mode => vec![mode.vector(s.files, s.users, s.seed)?],
    };
    let choice: DeliveryChoice = a.delivery.into();
    let failures = demands
        .par_iter()
        .map(|d| -> Result<Option<String>> {
            let transcript = deliver_limited(&caches, &files, d, &params, choice, a.max_coded_users)?;
            let report = verify_all(&caches, &transcript, d, &files)?;
            Ok((!report.all_decoded()).then(|| one_based(d)))
        })
        .collect::<Result<Vec<_>>>()?;
    let failed: Vec<String> = failures.into_iter().flatten().collect();
    let decoded = demands.len() - failed.len();
    match format {
        Format::Csv => {
            writeln!(out, "# seed={}", s.seed)?;
            writeln!(out, "{decoded}/{} demand vectors decoded", demands.len())?;
            for d in &failed {
                writeln!(out, "failed: {d}")?;
            }
        }
        Format::Json => {
            let doc = serde_json::json!({
                "seed": s.seed,
                "decoded": decoded,
                "total": demands.len(),
                "failed": failed,
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(failed.is_empty())
}

fn tree(a: &TreeArgs, format: Format, out: &mut impl Write) -> Result<bool> {
    let network = TreeNetwork::from_json(&read_file(&a.topology)?)?;
    let k = network.num_users();
    let m = a.memory.single()?;
    let params = SystemParams::new(a.files, k, m, a.file_bits, a.seed)?;
    let files = FileStore::generate(&params);
    let caches = decentralized_place(&params)?;
    let demands = a.demands.vector(a.files, k, a.seed)?;
    let transcript = deliver_limited(
        &caches,
        &files,
        &demands,
        &params,
        a.delivery.into(),
        coded_caching::delivery::DEFAULT_MAX_CODED_USERS,
    )?;
    let routing = route_transcript(&network, &transcript, &demands)?;
    let report = verify_tree_decode(&network, &routing, &caches, &files, &transcript, &demands)?;

    let mut table = Table::new(&[
        "parent",
        "child",
        "users_below",
        "bits",
        "messages",
        "measured_rate",
        "predicted_rate",
    ])
    .meta("N", a.files)
    .meta("K", k)
    .meta("M", m)
    .meta("F", a.file_bits)
    .meta("seed", a.seed)
    .meta("demands", one_based(&demands))
    .meta("decoded", report.all_decoded());
    let mut links = routing.links().to_vec();
    links.sort_by_key(|l| (l.parent, l.child));
    for link in &links {
        table.push(vec![
            link.parent.into(),
            link.child.into(),
            link.users_below.into(),
            link.bits.into(),
            link.messages.into(),
            (link.bits as f64 / a.file_bits as f64).into(),
            tree_link_rate(a.files, link.users_below, m)?.into(),
        ]);
    }
    table.write(out, format)?;
    if !report.all_decoded() {
        eprintln!("error: users {:?} failed to decode", report.failed_users());
    }
    Ok(report.all_decoded())
}

fn shared(a: &SharedArgs, format: Format, out: &mut impl Write) -> Result<bool> {
    let s = &a.system;
    let l = a.group_size;
    let mut table = Table::new(&["M", "measured_rate", "R_shared", "R_D", "decoded"])
        .meta("N", s.files)
        .meta("K", s.users)
        .meta("L", l)
        .meta("F", s.file_bits)
        .meta("seed", s.seed);
    let rows = s
        .memory
        .0
        .par_iter()
        .map(|&m| -> Result<Vec<Cell>> {
            let params = SystemParams::new(s.files, s.users, m, s.file_bits, s.seed)?;
            let files = FileStore::generate(&params);
            let demands = a.demands.vector(s.files, s.users, s.seed)?;
            let run = simulate_shared(&params, &files, &demands, l)?;
            let ok = verify_shared(&run, &files)?.all_decoded();
            Ok(vec![
                m.into(),
                run.rate().into(),
                rate_shared(s.files, s.users, l, m)?.into(),
                rate_decentralized(s.files, s.users, m)?.into(),
                ok.to_string().into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let all_ok = rows
        .iter()
        .all(|r| matches!(&r[4], Cell::Text(t) if t == "true"));
    for row in rows {
        table.push(row);
    }
    table.write(out, format)?;
    Ok(all_ok)
}

fn asynchronous(a: &AsyncArgs, format: Format, out: &mut impl Write) -> Result<bool> {
    let s = &a.system;
    let m = s.memory.single()?;
    let params = SystemParams::new(s.files, s.users, m, s.file_bits, s.seed)?;
    let files = FileStore::generate(&params);
    let arrivals = parse_arrivals_csv(&read_file(&a.arrivals)?, s.users, s.files)?;
    let caches = segment_placement(&params, a.segments)?;
    let schedule = schedule_async(&params, a.segments, &arrivals, &caches, &files)?;
    let ok = verify_async_decode(&schedule, &caches, &files)?.all_decoded();

    let delays: Vec<String> = schedule
        .delays
        .iter()
        .map(|d| format_sig(*d))
        .collect();
    let mut table = Table::new(&["slot", "users", "files", "segments", "payload_bits", "rate"])
        .meta("N", s.files)
        .meta("K", s.users)
        .meta("M", m)
        .meta("F", s.file_bits)
        .meta("J", a.segments)
        .meta("seed", s.seed)
        .meta("total_rate", format_sig(schedule.rate(s.file_bits)))
        .meta("max_delay", format_sig(schedule.max_delay()))
        .meta("delays", delays.join(";"))
        .meta("decoded", ok);
    let join = |f: &dyn Fn(&coded_caching::extensions::RoundEntry) -> usize, entries: &[_]| {
        entries
            .iter()
            .map(|e| f(e).to_string())
            .collect::<Vec<_>>()
            .join(";")
    };
    for round in &schedule.rounds {
        table.push(vec![
            round.slot.into(),
            join(&|e| e.user + 1, &round.entries).into(),
            join(&|e| e.file + 1, &round.entries).into(),
            join(&|e| e.segment + 1, &round.entries).into(),
            round.transcript.payload_bits().into(),
            (round.transcript.payload_bits() as f64 / s.file_bits as f64).into(),
        ]);
    }
    table.write(out, format)?;
    Ok(ok)
}

fn gaps(a: &GapsArgs, format: Format, out: &mut impl Write) -> Result<bool> {
    let summary = certify_gaps(a.max_files, a.max_users, a.points)?;
    let mut table = Table::new(&["gap", "ratio", "N", "K", "M"])
        .meta("max_files", a.max_files)
        .meta("max_users", a.max_users)
        .meta("points", a.points)
        .meta("evaluated", summary.evaluated);
    let row = |name: &str, p: &GapPeak| -> Vec<Cell> {
        vec![
            name.into(),
            p.ratio.into(),
            p.files.into(),
            p.users.into(),
            p.memory.into(),
        ]
    };
    table.push(row("to_lower_bound", &summary.to_optimal));
    table.push(row("to_centralized", &summary.to_centralized));
    table.write(out, format)?;
    Ok(true)
}
