use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use pap::avoidance::threshold_scan;
use pap::bk::build_bk;
use pap::game::cache::GrundyStore;
use pap::game::{Position, Solver};
use pap::pattern_set::PatternSet;
use pap::verify;

#[derive(Parser)]
#[command(name = "pap", about = "Solver and verifier for the pattern-avoidance game PAP")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Grundy cache file (read if present, updated on exit).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Lift the default work-size envelopes.
    #[arg(long, global = true)]
    long_run: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grundy values sg(S_n, k) for n = 1..n_max, k = 1..k_max.
    Table {
        #[arg(default_value_t = 10)]
        n_max: usize,
        #[arg(default_value_t = 4)]
        k_max: usize,
    },
    /// Avoider count, Grundy value, and winning replies of one position.
    Query {
        n: usize,
        k: usize,
        /// Comma-separated forbidden patterns, e.g. 1234,4321,1324.
        #[arg(default_value = "")]
        forbidden: String,
    },
    /// Exhaustive reverse-strategy check over a range of n.
    ReverseCheck {
        k: usize,
        /// n or lo..hi (inclusive). Defaults to the full supported range.
        #[arg(default_value = "default")]
        n_range: String,
    },
    /// Optimal-play line counts by length from S_n.
    OptimalDist {
        /// n or lo..hi (inclusive); "n" means the surveyed range 5..10.
        #[arg(default_value = "n")]
        n_range: String,
        #[arg(default_value_t = 4)]
        k: usize,
    },
    /// Avoider counts of B_k and the monotone-forcing threshold N_k.
    Thresholds {
        /// k or lo..hi (inclusive).
        k_range: String,
        n_max: usize,
    },
    /// Run one of the exhaustive verifications.
    Verify {
        /// k3 | k4-gap | k4-hard | k5 | recursive-bk | witnesses | bounds | all
        which: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(m) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(m)
            .build_global()
            .expect("thread pool not yet initialized");
    }
    match run(&cli) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_range(s: &str, default: (usize, usize)) -> Result<(usize, usize), String> {
    match s {
        "default" | "n" => return Ok(default),
        _ => {}
    }
    if let Some((lo, hi)) = s.split_once("..") {
        let lo = lo.trim().parse().map_err(|_| format!("bad range {s:?}"))?;
        let hi = hi.trim().parse().map_err(|_| format!("bad range {s:?}"))?;
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok((lo, hi))
    } else {
        let v: usize = s.trim().parse().map_err(|_| format!("bad range {s:?}"))?;
        Ok((v, v))
    }
}

struct CacheFile {
    path: Option<PathBuf>,
    store: GrundyStore,
}

impl CacheFile {
    fn open(path: Option<PathBuf>) -> Result<Self, String> {
        let store = match &path {
            Some(p) if p.exists() => GrundyStore::load(p).map_err(|e| e.to_string())?,
            _ => GrundyStore::new(),
        };
        Ok(CacheFile { path, store })
    }

    fn solver(&self, n: usize, k: usize) -> Result<Solver, String> {
        let mut solver = Solver::new(n, k).map_err(|e| e.to_string())?;
        if let Some(map) = self.store.table(n, k) {
            solver.preload(map);
        }
        Ok(solver)
    }

    fn absorb(&mut self, solver: &Solver) {
        self.store.merge_in(solver.n(), solver.k(), solver.export());
    }

    fn flush(&self) -> Result<(), String> {
        if let Some(p) = &self.path {
            self.store.save(p).map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

fn emit(json_mode: bool, text: &[String], value: Value) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    } else {
        for line in text {
            println!("{line}");
        }
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    let mut cache = CacheFile::open(cli.cache.clone())?;
    let result = match &cli.command {
        Command::Table { n_max, k_max } => cmd_table(cli, &mut cache, *n_max, *k_max),
        Command::Query { n, k, forbidden } => cmd_query(cli, &mut cache, *n, *k, forbidden),
        Command::ReverseCheck { k, n_range } => cmd_reverse_check(cli, *k, n_range),
        Command::OptimalDist { n_range, k } => cmd_optimal_dist(cli, &mut cache, n_range, *k),
        Command::Thresholds { k_range, n_max } => cmd_thresholds(cli, k_range, *n_max),
        Command::Verify { which } => cmd_verify(cli, which),
    };
    cache.flush()?;
    result
}

fn check_game_envelope(cli: &Cli, n: usize, k: usize) -> Result<(), String> {
    if k > 4 {
        return Err(format!("game computations support k <= 4, got {k}"));
    }
    let cap = if cli.long_run { 11 } else { 10 };
    if n > cap {
        return Err(format!(
            "n = {n} exceeds the default envelope of {cap}{}",
            if cli.long_run { "" } else { " (use --long-run)" }
        ));
    }
    Ok(())
}

fn cmd_table(cli: &Cli, cache: &mut CacheFile, n_max: usize, k_max: usize) -> Result<bool, String> {
    check_game_envelope(cli, n_max, k_max)?;
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for n in 1..=n_max {
        let mut row = Vec::new();
        for k in 1..=k_max {
            let mut solver = cache.solver(n, k)?;
            row.push(solver.grundy_mask(0));
            cache.absorb(&solver);
        }
        rows.push(row);
    }
    let header = std::iter::once("n".to_string())
        .chain((1..=k_max).map(|k| format!("sg{k}")))
        .collect::<Vec<_>>()
        .join("\t");
    let mut text = vec![header];
    for (i, row) in rows.iter().enumerate() {
        let mut line = format!("{}", i + 1);
        for v in row {
            line.push('\t');
            line.push_str(&v.to_string());
        }
        text.push(line);
    }
    let value = json!({
        "command": "table",
        "n_max": n_max,
        "k_max": k_max,
        "rows": rows,
    });
    emit(cli.json, &text, value);
    Ok(true)
}

fn cmd_query(
    cli: &Cli,
    cache: &mut CacheFile,
    n: usize,
    k: usize,
    forbidden: &str,
) -> Result<bool, String> {
    check_game_envelope(cli, n, k)?;
    let forbidden = PatternSet::parse_list(k, forbidden).map_err(|e| e.to_string())?;
    let mut solver = cache.solver(n, k)?;
    let pos = Position::with_forbidden(n, forbidden);
    let count = solver.avoider_count(&pos.forbidden);
    let sg = solver.grundy(&pos);
    let replies = solver.winning_replies(&pos);
    cache.absorb(&solver);
    let text = vec![
        format!("count={count}"),
        format!("sg={sg}"),
        format!("winning_replies={}", replies.to_list_string()),
    ];
    let value = json!({
        "command": "query",
        "n": n,
        "k": k,
        "forbidden": pos.forbidden.to_list_string(),
        "count": count,
        "sg": sg,
        "winning_replies": replies.iter_perms().map(|p| p.to_string()).collect::<Vec<_>>(),
    });
    emit(cli.json, &text, value);
    Ok(true)
}

fn cmd_reverse_check(cli: &Cli, k: usize, n_range: &str) -> Result<bool, String> {
    let default = match k {
        3 => (3, 8),
        4 => (4, 10),
        _ => (k.max(1), 10),
    };
    let (lo, hi) = parse_range(n_range, default)?;
    check_game_envelope(cli, hi, k)?;
    if k == 3 && hi > 8 && !cli.long_run {
        return Err("k = 3 reverse checks beyond n = 8 need --long-run".into());
    }
    let mut text = Vec::new();
    let mut records = Vec::new();
    for n in lo..=hi {
        let mut solver = Solver::new(n, k).map_err(|e| e.to_string())?;
        let outcome = solver.reverse_strategy_check();
        let line = match &outcome.counterexample {
            None => format!("n={n} holds"),
            Some(moves) => format!(
                "n={n} fails line={}",
                moves
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        };
        text.push(line);
        records.push(json!({
            "n": n,
            "holds": outcome.holds,
            "counterexample": outcome
                .counterexample
                .map(|ms| ms.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
        }));
    }
    let value = json!({"command": "reverse-check", "k": k, "results": records});
    emit(cli.json, &text, value);
    Ok(true)
}

fn cmd_optimal_dist(
    cli: &Cli,
    cache: &mut CacheFile,
    n_range: &str,
    k: usize,
) -> Result<bool, String> {
    let (lo, hi) = parse_range(n_range, (5, 10))?;
    check_game_envelope(cli, hi, k)?;
    let mut text = Vec::new();
    let mut records = Vec::new();
    for n in lo..=hi {
        let mut solver = cache.solver(n, k)?;
        let dist = solver.optimal_play_distribution();
        cache.absorb(&solver);
        text.push(format!("n={n}"));
        for &(len, count) in &dist {
            text.push(format!("{len}\t{count}"));
        }
        records.push(json!({
            "n": n,
            "lengths": dist
                .iter()
                .map(|&(len, c)| json!({"length": len, "count": c.to_string()}))
                .collect::<Vec<_>>(),
        }));
    }
    let value = json!({"command": "optimal-dist", "k": k, "results": records});
    emit(cli.json, &text, value);
    Ok(true)
}

fn cmd_thresholds(cli: &Cli, k_range: &str, n_max: usize) -> Result<bool, String> {
    let (lo, hi) = parse_range(k_range, (3, 5))?;
    if lo < 3 {
        return Err("thresholds require k >= 3".into());
    }
    if hi > 5 && !cli.long_run {
        return Err("thresholds beyond k = 5 need --long-run".into());
    }
    let mut text = Vec::new();
    let mut records = Vec::new();
    for k in lo..=hi {
        let bk = build_bk(k).map_err(|e| e.to_string())?;
        let scan = threshold_scan(k, n_max, &bk.members);
        for (i, &c) in scan.counts.iter().enumerate() {
            text.push(format!("k={k}\tn={}\tcount={c}", i + 1));
        }
        match scan.threshold {
            Some(t) => text.push(format!("k={k}\tN={t}")),
            None => text.push(format!("k={k}\tN=not reached by n={n_max}")),
        }
        records.push(json!({
            "k": k,
            "counts": scan.counts,
            "threshold": scan.threshold,
        }));
    }
    let value = json!({"command": "thresholds", "n_max": n_max, "results": records});
    emit(cli.json, &text, value);
    Ok(true)
}

fn cmd_verify(cli: &Cli, which: &str) -> Result<bool, String> {
    let mut text = Vec::new();
    let mut records = Vec::new();
    let mut ok = true;
    let run_k3 = |text: &mut Vec<String>, records: &mut Vec<Value>, ok: &mut bool| {
        let r = verify::verify_k3();
        *ok &= r.pass();
        text.extend(r.lines());
        records.push(json!({
            "check": "k3",
            "identities_ok": r.identities_ok,
            "reverse_holds": r.reverse_holds,
            "pass": r.pass(),
        }));
    };
    let run_gap = |text: &mut Vec<String>, records: &mut Vec<Value>, ok: &mut bool| {
        let r = verify::gap_cases_k4();
        *ok &= r.pass();
        text.push(r.summary_line());
        records.push(json!({
            "check": "k4-gap",
            "checks": r.checks,
            "symmetry_classes": r.symmetry_classes,
            "all_resolved": r.all_resolved,
            "pass": r.pass(),
        }));
    };
    let run_hard = |text: &mut Vec<String>, records: &mut Vec<Value>, ok: &mut bool| {
        let r = verify::hard_pair_supports();
        *ok &= r.pass();
        text.push(r.summary_line());
        records.push(json!({
            "check": "k4-hard",
            "supports": r.supports,
            "legal_states": r.legal_states,
            "covered": r.covered,
            "collections_equal": r.collections_equal,
            "pass": r.pass(),
        }));
    };
    let run_k5 = |text: &mut Vec<String>, records: &mut Vec<Value>, ok: &mut bool| {
        let mut r = verify::k5_fullspace();
        if !r.pass() {
            for base in [6usize, 8] {
                let alt = verify::k5_fullspace_with_base(base);
                if alt.pass() {
                    r = alt;
                    break;
                }
            }
        }
        *ok &= r.pass();
        text.extend(r.summary_lines());
        records.push(json!({
            "check": "k5",
            "one_companion_targets": r.one_companion_targets,
            "total_nonB5_nonmonotone": r.total_nonb5_nonmonotone,
            "separable_pairs": r.separable_pairs,
            "total_pairs": r.total_pairs,
            "base_len": r.base_len,
            "pass": r.pass(),
        }));
    };
    let run_recursive = |text: &mut Vec<String>, records: &mut Vec<Value>, ok: &mut bool| {
        let rs = verify::verify_recursive_bk_range(4, 7);
        for &(k, pass) in &rs {
            *ok &= pass;
            text.push(format!(
                "recursive_bk k={k} {}",
                if pass { "ok" } else { "mismatch" }
            ));
        }
        records.push(json!({"check": "recursive-bk", "results": rs}));
    };
    let run_witnesses = |text: &mut Vec<String>, records: &mut Vec<Value>, ok: &mut bool| {
        let pass = verify::verify_witnesses(12);
        *ok &= pass;
        text.push(format!("witnesses {}", if pass { "ok" } else { "mismatch" }));
        records.push(json!({"check": "witnesses", "pass": pass}));
    };
    let run_bounds = |text: &mut Vec<String>, records: &mut Vec<Value>, ok: &mut bool| {
        let pass = verify::verify_bounds(6, 13);
        *ok &= pass;
        text.push(format!("bounds {}", if pass { "ok" } else { "mismatch" }));
        records.push(json!({"check": "bounds", "pass": pass}));
    };
    match which {
        "k3" => run_k3(&mut text, &mut records, &mut ok),
        "k4-gap" => run_gap(&mut text, &mut records, &mut ok),
        "k4-hard" => run_hard(&mut text, &mut records, &mut ok),
        "k5" => run_k5(&mut text, &mut records, &mut ok),
        "recursive-bk" => run_recursive(&mut text, &mut records, &mut ok),
        "witnesses" => run_witnesses(&mut text, &mut records, &mut ok),
        "bounds" => run_bounds(&mut text, &mut records, &mut ok),
        "all" => {
            run_k3(&mut text, &mut records, &mut ok);
            run_gap(&mut text, &mut records, &mut ok);
            run_hard(&mut text, &mut records, &mut ok);
            run_k5(&mut text, &mut records, &mut ok);
            run_recursive(&mut text, &mut records, &mut ok);
            run_witnesses(&mut text, &mut records, &mut ok);
            run_bounds(&mut text, &mut records, &mut ok);
        }
        other => return Err(format!("unknown verification {other:?}")),
    }
    let value = json!({"command": "verify", "which": which, "ok": ok, "results": records});
    emit(cli.json, &text, value);
    Ok(ok)
}
