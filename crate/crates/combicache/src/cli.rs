//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 when a verification or assertion fails
//! (reconstruction failure, comparison or optimality violation, oracle
//! mismatch), 2 on usage or parameter errors. Output is deterministic for a
//! fixed command line and seed. `COMBICACHE_MAX_ENUM` overrides the
//! exhaustive-enumeration cap (default 10^7).

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bounds::{self, TradeoffPoint};
use crate::combinatorics::{self, pruned_cached_per_user, pruned_cached_per_user_bruteforce};
use crate::delivery::{self, DemandPolicy, DemandVector, LoadReport};
use crate::error::Error;
use crate::mdscodec::MdsCode;
use crate::placement::{self, required_block_size, PlacementLayout, Scheme, SymbolKey};
use crate::rat::{self, Rat, RatJson};
use crate::topology::CombinationNetwork;
use crate::verify::{self, UserOutcome};
use crate::Result;

#[derive(Parser)]
#[command(
    name = "combicache",
    version,
    about = "Coded cache placement and multicast delivery for combination networks",
    after_help = "Env: COMBICACHE_MAX_ENUM caps exhaustive enumerations (default 10000000)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print network sizes and both adjacency tables.
    Topology(TopologyArgs),
    /// Build a placement and summarize its layout.
    Place(PlaceArgs),
    /// Build a delivery plan and report exact per-link loads.
    Deliver(DeliverArgs),
    /// Bit-exact end-to-end run; exits nonzero on reconstruction failure.
    Verify(VerifyArgs),
    /// Emit memory-load tradeoff curves as CSV.
    Curve(CurveArgs),
    /// Minimum-memory comparison against the relay-partition baseline.
    Compare(CompareArgs),
    /// Large-memory optimality check against the cut-set bound.
    Optimal(OptimalArgs),
    /// Pruned-count closed form, optionally checked against the oracle.
    Lemma1(Lemma1Args),
    /// Built-in regression fixtures.
    Fixtures(FixturesArgs),
}

#[derive(Args)]
struct NetArgs {
    /// Number of relays.
    #[arg(long = "H")]
    relays: usize,
    /// Relays per user.
    #[arg(long = "r")]
    degree: usize,
}

#[derive(Args)]
struct TopologyArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SchemeArgs {
    /// Placement scheme.
    #[arg(long, value_parser = ["man", "asym", "coded", "improved"])]
    scheme: String,
    /// Target multicast gain (coded/improved schemes).
    #[arg(long = "g")]
    gain: Option<usize>,
    /// Subfile replication parameter (man scheme).
    #[arg(long = "t")]
    t: Option<usize>,
}

#[derive(Args)]
struct PlaceArgs {
    #[command(flatten)]
    net: NetArgs,
    /// Number of files.
    #[arg(long = "N")]
    files: usize,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long)]
    json: bool,
    /// Dump the erasure-code generator matrix for audit.
    #[arg(long = "debug-mds")]
    debug_mds: bool,
}

#[derive(Args)]
struct DeliverArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long = "N")]
    files: usize,
    #[command(flatten)]
    scheme: SchemeArgs,
    /// distinct | all | sample:<n>:<seed>
    #[arg(long, default_value = "distinct")]
    demand: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long = "N")]
    files: usize,
    #[command(flatten)]
    scheme: SchemeArgs,
    /// File size in bytes (multiple of the layout's block size).
    #[arg(long = "B")]
    file_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// distinct | all | sample:<n>:<seed> (each sampled demand is simulated)
    #[arg(long, default_value = "distinct")]
    demand: String,
    /// Output format for the run record.
    #[arg(long, value_parser = ["text", "json"], default_value = "text")]
    report: String,
    /// Include file bytes (hex) in the JSON run record.
    #[arg(long = "dump-bytes")]
    dump_bytes: bool,
    #[arg(long = "debug-mds")]
    debug_mds: bool,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long = "N")]
    files: usize,
    /// Comma-separated: thm1,thm3,zewail,routing,cutset
    #[arg(long, default_value = "thm1,cutset")]
    schemes: String,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OptimalArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long = "N")]
    files: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Lemma1Args {
    #[command(flatten)]
    net: NetArgs,
    /// Collection size.
    #[arg(long = "q")]
    collection_size: usize,
    /// Also run the enumeration oracle for every user.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct FixturesArgs {
    /// Run only fixtures whose name contains this substring.
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    json: bool,
}

/// Parse and dispatch; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version, 2 for usage errors.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Topology(a) => cmd_topology(a),
        Command::Place(a) => cmd_place(a),
        Command::Deliver(a) => cmd_deliver(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Optimal(a) => cmd_optimal(a),
        Command::Lemma1(a) => cmd_lemma1(a),
        Command::Fixtures(a) => cmd_fixtures(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn build_layout(
    net: &CombinationNetwork,
    files: usize,
    scheme: &SchemeArgs,
) -> Result<PlacementLayout> {
    match scheme.scheme.as_str() {
        "man" => {
            let t = scheme
                .t
                .ok_or_else(|| Error::Parameter("scheme 'man' needs --t".into()))?;
            placement::man_placement(net, files, t)
        }
        "asym" => placement::asym_uncoded_placement(net, files),
        "coded" => {
            let g = scheme
                .gain
                .ok_or_else(|| Error::Parameter("scheme 'coded' needs --g".into()))?;
            placement::asym_coded_placement(net, files, g)
        }
        "improved" => {
            let g = scheme
                .gain
                .ok_or_else(|| Error::Parameter("scheme 'improved' needs --g".into()))?;
            placement::improved_placement(net, files, g)
        }
        other => Err(Error::Parameter(format!("unknown scheme '{other}'"))),
    }
}

fn parse_policy(s: &str) -> Result<DemandPolicy> {
    if s == "distinct" {
        return Ok(DemandPolicy::Distinct);
    }
    if s == "all" {
        return Ok(DemandPolicy::All);
    }
    if let Some(rest) = s.strip_prefix("sample:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() == 2 {
            if let (Ok(count), Ok(seed)) = (parts[0].parse(), parts[1].parse()) {
                return Ok(DemandPolicy::Sampled { count, seed });
            }
        }
    }
    Err(Error::Parameter(format!(
        "demand policy '{s}' is not distinct | all | sample:<n>:<seed>"
    )))
}

fn scheme_config(scheme: &SchemeArgs) -> String {
    let mut s = format!("scheme={}", scheme.scheme);
    if let Some(g) = scheme.gain {
        s.push_str(&format!(" g={g}"));
    }
    if let Some(t) = scheme.t {
        s.push_str(&format!(" t={t}"));
    }
    s
}

fn scheme_json(layout: &PlacementLayout) -> serde_json::Value {
    match layout.scheme {
        Scheme::Man { t } => json!({"name": "man", "t": t}),
        Scheme::Asym => json!({"name": "asym"}),
        Scheme::Coded { g } => json!({"name": "coded", "g": g}),
        Scheme::Improved { g } => json!({"name": "improved", "g": g}),
    }
}

fn key_json(key: &SymbolKey) -> serde_json::Value {
    match key {
        SymbolKey::UserSet(w) => json!({ "subfile": w }),
        SymbolKey::Collection(c) => json!({ "collection": c.subsets() }),
    }
}

fn rat_json(r: &Rat) -> serde_json::Value {
    serde_json::to_value(RatJson::from(r)).expect("rational serializes")
}

fn cmd_topology(a: TopologyArgs) -> Result<i32> {
    let net = CombinationNetwork::build(a.net.relays, a.net.degree)?;
    let users: Vec<Vec<usize>> = (1..=net.user_count())
        .map(|k| net.relays_of_user(k).map(|s| s.to_vec()))
        .collect::<Result<_>>()?;
    if a.json {
        let value = json!({
            "H": net.relay_count(),
            "r": net.degree(),
            "K": net.user_count(),
            "K_prime": net.users_per_relay(),
            "K_dprime": net.placement_subset_count(),
            "users": users,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!(
            "H={} r={} K={} K'={} K''={}",
            net.relay_count(),
            net.degree(),
            net.user_count(),
            net.users_per_relay(),
            net.placement_subset_count()
        );
        for h in 1..=net.relay_count() {
            println!("relay {h}: users {:?}", net.users_of_relay(h)?);
        }
        for (idx, relays) in users.iter().enumerate() {
            println!("user {}: relays {:?}", idx + 1, relays);
        }
    }
    Ok(0)
}

fn dump_generator(layout: &PlacementLayout) -> Result<()> {
    let Some(params) = layout.mds else {
        println!("generator: none (no precoding)");
        return Ok(());
    };
    let code = MdsCode::new(params.n, params.k)?;
    let rows = code.generator_matrix()?;
    println!("generator ({}x{}):", params.k, params.n);
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:04x}")).collect();
        println!("  {}", cells.join(" "));
    }
    Ok(())
}

fn cmd_place(a: PlaceArgs) -> Result<i32> {
    let net = CombinationNetwork::build(a.net.relays, a.net.degree)?;
    let layout = build_layout(&net, a.files, &a.scheme)?;
    if a.json {
        let mut symbols = Vec::with_capacity(layout.files * layout.symbol_count());
        for file in 1..=layout.files {
            for spec in &layout.symbols {
                symbols.push(json!({
                    "file": file,
                    "key": key_json(&spec.key),
                    "cached_by": spec.cached_by,
                }));
            }
        }
        let value = json!({
            "config": {"H": a.net.relays, "r": a.net.degree, "N": a.files},
            "scheme": scheme_json(&layout),
            "g": layout.gain,
            "M": rat_json(&layout.memory),
            "subpacketization": layout.subpacketization,
            "mds": layout.mds.map(|m| json!({"n": m.n, "k": m.k})),
            "block_size": required_block_size(&net, &layout),
            "symbols": symbols,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!(
            "config: H={} r={} N={} {}",
            a.net.relays,
            a.net.degree,
            a.files,
            scheme_config(&a.scheme)
        );
        println!("scheme: {}", layout.scheme);
        println!("subpacketization: {}", layout.subpacketization);
        match layout.mds {
            Some(m) => println!("mds: ({}, {})", m.n, m.k),
            None => println!("mds: none"),
        }
        println!(
            "M = {} ({})",
            rat::display(&layout.memory),
            rat::to_f64(&layout.memory)
        );
        println!(
            "block size B0 = {} bytes",
            required_block_size(&net, &layout)
        );
        if a.debug_mds {
            dump_generator(&layout)?;
        }
    }
    Ok(0)
}

fn print_load_report(report: &LoadReport) {
    for (idx, load) in report.relay_loads.iter().enumerate() {
        println!(
            "R_{} = {} ({})",
            idx + 1,
            rat::display(load),
            rat::to_f64(load)
        );
    }
    for (h, k, load) in &report.link_loads {
        println!(
            "R_{h}->{k} = {} ({})",
            rat::display(load),
            rat::to_f64(load)
        );
    }
    println!(
        "max-link load = {} ({})",
        rat::display(&report.max_link_load),
        rat::to_f64(&report.max_link_load)
    );
    match &report.measured_gain {
        Some(g) => println!("measured gain = {} ({})", rat::display(g), rat::to_f64(g)),
        None => println!("measured gain = n/a (nothing sent)"),
    }
}

fn report_json(report: &LoadReport) -> serde_json::Value {
    json!({
        "R_h": report.relay_loads.iter().map(rat_json).collect::<Vec<_>>(),
        "R_hk": report
            .link_loads
            .iter()
            .map(|(h, k, l)| json!({"h": h, "k": k, "load": rat_json(l)}))
            .collect::<Vec<_>>(),
        "max": rat_json(&report.max_link_load),
        "gain": report.measured_gain.as_ref().map(rat_json),
    })
}

fn cmd_deliver(a: DeliverArgs) -> Result<i32> {
    let net = CombinationNetwork::build(a.net.relays, a.net.degree)?;
    let layout = build_layout(&net, a.files, &a.scheme)?;
    let policy = parse_policy(&a.demand)?;
    let worst = delivery::worst_case_load(&net, &layout, policy)?;
    if a.json {
        let mut value = report_json(&worst.report);
        let obj = value.as_object_mut().expect("report is an object");
        obj.insert(
            "config".into(),
            json!({
                "H": a.net.relays, "r": a.net.degree, "N": a.files,
                "scheme": scheme_json(&layout), "demand": a.demand,
            }),
        );
        obj.insert("evaluated".into(), json!(worst.evaluated));
        obj.insert("worst_demand".into(), json!(worst.worst_demand.as_slice()));
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!(
            "config: H={} r={} N={} {} demand={}",
            a.net.relays,
            a.net.degree,
            a.files,
            scheme_config(&a.scheme),
            a.demand
        );
        println!(
            "evaluated {} demand vector(s); worst: {:?}",
            worst.evaluated,
            worst.worst_demand.as_slice()
        );
        print_load_report(&worst.report);
        if let Some(diag) =
            delivery::build_delivery(&net, &layout, &worst.worst_demand)?.diagnostics
        {
            println!(
                "routing cross-check: {} of {} assignments diverge from pure argmax",
                diag.divergences, diag.checked
            );
        }
    }
    Ok(0)
}

fn demand_list(
    net: &CombinationNetwork,
    files: usize,
    policy: DemandPolicy,
) -> Result<Vec<DemandVector>> {
    match policy {
        DemandPolicy::Distinct => Ok(vec![DemandVector::distinct(net, files)?]),
        DemandPolicy::All => {
            let total = num::BigUint::from(files).pow(net.user_count() as u32);
            let cap = combinatorics::enumeration_cap();
            if total > num::BigUint::from(cap) {
                return Err(Error::EnumerationCap { needed: total, cap });
            }
            let mut out = Vec::new();
            let k = net.user_count();
            let mut d = vec![1usize; k];
            loop {
                out.push(DemandVector::new(net, files, d.clone())?);
                let mut pos = k;
                while pos > 0 {
                    if d[pos - 1] < files {
                        d[pos - 1] += 1;
                        break;
                    }
                    d[pos - 1] = 1;
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
            }
            Ok(out)
        }
        DemandPolicy::Sampled { count, seed } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let d: Vec<usize> = (0..net.user_count())
                        .map(|_| rng.random_range(1..=files))
                        .collect();
                    DemandVector::new(net, files, d)
                })
                .collect()
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let net = CombinationNetwork::build(a.net.relays, a.net.degree)?;
    let layout = build_layout(&net, a.files, &a.scheme)?;
    let policy = parse_policy(&a.demand)?;
    let demands = demand_list(&net, a.files, policy)?;

    let mut runs = Vec::new();
    let mut all_ok = true;
    for demand in &demands {
        let run = verify::simulate(&net, &layout, demand, a.file_size, a.seed)?;
        all_ok &= run.ok;
        runs.push(run);
    }

    if a.report == "json" {
        let files_hex: Option<Vec<String>> = a.dump_bytes.then(|| {
            verify::generate_files(layout.files, a.file_size, a.seed)
                .iter()
                .map(|f| hex_string(f))
                .collect()
        });
        let value = json!({
            "config": {
                "H": a.net.relays, "r": a.net.degree, "N": a.files,
                "scheme": scheme_json(&layout), "B": a.file_size,
                "seed": a.seed, "demand": a.demand, "rng": verify::RNG_ALGORITHM,
            },
            "block_size": required_block_size(&net, &layout),
            "runs": runs.iter().map(run_json).collect::<Vec<_>>(),
            "files": files_hex,
            "ok": all_ok,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!(
            "config: H={} r={} N={} {} B={} seed={} demand={} rng={}",
            a.net.relays,
            a.net.degree,
            a.files,
            scheme_config(&a.scheme),
            a.file_size,
            a.seed,
            a.demand,
            verify::RNG_ALGORITHM
        );
        for run in &runs {
            let recovered = run
                .outcomes
                .iter()
                .filter(|o| matches!(o, UserOutcome::Recovered))
                .count();
            println!(
                "demand {:?}: {}/{} users recovered{}",
                run.demand.as_slice(),
                recovered,
                run.outcomes.len(),
                if run.ok { "" } else { "  <-- FAILURE" }
            );
            for (idx, outcome) in run.outcomes.iter().enumerate() {
                if let UserOutcome::Failed(f) = outcome {
                    println!("  user {}: {f}", idx + 1);
                }
            }
        }
        if a.debug_mds {
            dump_generator(&layout)?;
        }
        println!("verdict: {}", if all_ok { "PASS" } else { "FAIL" });
    }
    Ok(if all_ok { 0 } else { 1 })
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn run_json(run: &verify::SimulationRun) -> serde_json::Value {
    json!({
        "demand": run.demand.as_slice(),
        "outcomes": run
            .outcomes
            .iter()
            .map(|o| match o {
                UserOutcome::Recovered => json!({"recovered": true}),
                UserOutcome::Failed(f) => json!({
                    "recovered": false,
                    "detail": f.detail,
                    "missing": f.missing,
                }),
            })
            .collect::<Vec<_>>(),
        "server_relay_bytes": run.server_relay_bytes,
        "relay_user_bytes": run
            .relay_user_bytes
            .iter()
            .map(|(h, k, b)| json!({"h": h, "k": k, "bytes": b}))
            .collect::<Vec<_>>(),
        "ok": run.ok,
    })
}

struct CsvRow {
    scheme: String,
    gain: Option<usize>,
    memory: Rat,
    load: Rat,
}

impl CsvRow {
    fn from_point(p: &TradeoffPoint, scheme: &str) -> Self {
        CsvRow {
            scheme: scheme.to_string(),
            gain: p.gain,
            memory: p.memory.clone(),
            load: p.load.clone(),
        }
    }
}

fn curve_rows(relays: usize, degree: usize, files: usize, tokens: &[&str]) -> Result<Vec<CsvRow>> {
    let mut rows = Vec::new();
    let mut anchors_done = false;
    for token in tokens {
        match *token {
            "thm1" | "thm3" => {
                let points = if *token == "thm1" {
                    bounds::coded_points(relays, degree, files)?
                } else {
                    bounds::pruned_points(relays, degree, files)?
                };
                for p in points.iter().filter(|p| !p.anchor) {
                    rows.push(CsvRow::from_point(p, token));
                }
                if !anchors_done {
                    for p in points.iter().filter(|p| p.anchor) {
                        rows.push(CsvRow::from_point(p, "anchor"));
                    }
                    anchors_done = true;
                }
                let hull = bounds::lower_convex_envelope(&points)?;
                for p in &hull.points {
                    rows.push(CsvRow::from_point(p, &format!("{token}-envelope")));
                }
            }
            "zewail" => {
                for p in bounds::zewail_curve(relays, degree, files)? {
                    rows.push(CsvRow::from_point(&p, "zewail"));
                }
            }
            "routing" => {
                let zero = rat::zero();
                let full = rat::int(files as i64);
                rows.push(CsvRow {
                    scheme: "routing".into(),
                    gain: None,
                    load: bounds::routing_load(relays, degree, files, &zero)?,
                    memory: zero,
                });
                rows.push(CsvRow {
                    scheme: "routing".into(),
                    gain: None,
                    load: rat::zero(),
                    memory: full,
                });
            }
            "cutset" => {
                let zero = rat::zero();
                let full = rat::int(files as i64);
                rows.push(CsvRow {
                    scheme: "cutset".into(),
                    gain: None,
                    load: bounds::cutset_bound(relays, degree, files, &zero)?,
                    memory: zero,
                });
                rows.push(CsvRow {
                    scheme: "cutset".into(),
                    gain: None,
                    load: rat::zero(),
                    memory: full,
                });
            }
            other => {
                return Err(Error::Parameter(format!(
                    "unknown curve scheme '{other}' (thm1, thm3, zewail, routing, cutset)"
                )))
            }
        }
    }
    Ok(rows)
}

fn cmd_curve(a: CurveArgs) -> Result<i32> {
    let tokens: Vec<&str> = a.schemes.split(',').map(str::trim).collect();
    let rows = curve_rows(a.net.relays, a.net.degree, a.files, &tokens)?;
    let mut csv = String::from("scheme,g,M_num,M_den,R_num,R_den,M_float,R_float\n");
    for row in &rows {
        let g = row.gain.map(|g| g.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.scheme,
            g,
            row.memory.numer(),
            row.memory.denom(),
            row.load.numer(),
            row.load.denom(),
            rat::to_f64(&row.memory),
            rat::to_f64(&row.load)
        ));
    }
    eprintln!(
        "# curve H={} r={} N={} schemes={}",
        a.net.relays, a.net.degree, a.files, a.schemes
    );
    match &a.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(csv.as_bytes())?;
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_compare(a: CompareArgs) -> Result<i32> {
    let cmp = bounds::min_memory_comparison(a.net.relays, a.net.degree)?;
    if a.json {
        let value = json!({
            "config": {"H": cmp.relays, "r": cmp.degree},
            "entries": cmp.entries.iter().map(|e| json!({
                "g": e.gain,
                "coded": rat_json(&e.coded_memory),
                "baseline": rat_json(&e.baseline_memory),
                "strictly_smaller": e.strictly_smaller,
                "claimed": e.claimed,
            })).collect::<Vec<_>>(),
            "pass": cmp.pass,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!(
            "config: H={} r={} (memories per unit library)",
            cmp.relays, cmp.degree
        );
        for e in &cmp.entries {
            println!(
                "g={}: coded {} vs baseline {} -> {}{}",
                e.gain,
                rat::display(&e.coded_memory),
                rat::display(&e.baseline_memory),
                if e.strictly_smaller {
                    "smaller"
                } else {
                    "not smaller"
                },
                if e.claimed {
                    " (asserted)"
                } else {
                    " (informational)"
                }
            );
        }
        println!("verdict: {}", if cmp.pass { "PASS" } else { "FAIL" });
    }
    Ok(if cmp.pass { 0 } else { 1 })
}

fn cmd_optimal(a: OptimalArgs) -> Result<i32> {
    let rep = bounds::optimality_check(a.net.relays, a.net.degree, a.files)?;
    if a.json {
        let value = json!({
            "config": {"H": a.net.relays, "r": a.net.degree, "N": a.files},
            "degenerate": rep.degenerate,
            "corner_M": rat_json(&rep.corner_memory),
            "corner_R": rat_json(&rep.corner_load),
            "corner_matches_formula": rep.corner_matches_formula,
            "corner_meets_bound": rep.corner_meets_bound,
            "envelope_linear": rep.envelope_linear,
            "all_points_above_bound": rep.all_points_above_bound,
            "pass": rep.pass,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!(
            "config: H={} r={} N={}",
            a.net.relays, a.net.degree, a.files
        );
        println!(
            "corner: M = {}, R = {}{}",
            rat::display(&rep.corner_memory),
            rat::display(&rep.corner_load),
            if rep.degenerate {
                " (degenerate network)"
            } else {
                ""
            }
        );
        println!(
            "corner matches formula: {}; meets cut-set bound: {}; envelope linear to (N, 0): {}",
            rep.corner_matches_formula, rep.corner_meets_bound, rep.envelope_linear
        );
        println!(
            "optimal for M in [{}, {}]",
            rat::display(&rep.corner_memory),
            a.files
        );
        println!("verdict: {}", if rep.pass { "PASS" } else { "FAIL" });
    }
    Ok(if rep.pass { 0 } else { 1 })
}

fn cmd_lemma1(a: Lemma1Args) -> Result<i32> {
    let net = CombinationNetwork::build(a.net.relays, a.net.degree)?;
    let q = a.collection_size;
    let k2 = net.placement_subset_count();
    if q == 0 || q > k2 {
        return Err(Error::Parameter(format!("q={q} not in 1..={k2}")));
    }
    let formula = pruned_cached_per_user(a.net.relays, a.net.degree, q);
    if !a.check {
        println!("G={formula}");
        return Ok(0);
    }
    let mut oracle_values = Vec::new();
    for user in 1..=net.user_count() {
        oracle_values.push(pruned_cached_per_user_bruteforce(&net, q, user)?);
    }
    let first = oracle_values[0];
    let k_independent = oracle_values.iter().all(|&v| v == first);
    let matches = k_independent && num::BigUint::from(first) == formula;
    println!(
        "G={formula}, oracle={first}, {}",
        if matches { "MATCH" } else { "MISMATCH" }
    );
    if !k_independent {
        println!("per-user oracle values: {oracle_values:?}");
    }
    Ok(if matches { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

struct FixtureResult {
    name: &'static str,
    pass: bool,
    detail: String,
    millis: u128,
}

fn fixture(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> FixtureResult {
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    FixtureResult {
        name,
        pass,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

fn fixture_example1() -> Result<(bool, String)> {
    let net = CombinationNetwork::build(5, 3)?;
    let layout = placement::asym_uncoded_placement(&net, 10)?;
    let mut ok = layout.memory == rat::int(7);
    let d = DemandVector::distinct(&net, 10)?;
    let report = delivery::load_report(&delivery::build_delivery(&net, &layout, &d)?);
    ok &= report.max_link_load == rat::rat(1, 10);
    ok &= bounds::cutset_bound(5, 3, 10, &rat::int(7))? == rat::rat(1, 10);
    let b = required_block_size(&net, &layout) * 5;
    let run = verify::simulate(&net, &layout, &d, b, 1)?;
    ok &= run.ok;
    Ok((
        ok,
        format!(
            "M={} load={} (baseline reports {}); {} users recovered",
            rat::display(&layout.memory),
            rat::display(&report.max_link_load),
            bounds::reference::BASELINE_LOAD_H5_R3_M7,
            run.outcomes.len()
        ),
    ))
}

fn fixture_example2() -> Result<(bool, String)> {
    let net = CombinationNetwork::build(4, 2)?;
    let layout = placement::asym_coded_placement(&net, 6, 2)?;
    let mut ok = layout.memory == rat::rat(6, 5);
    ok &= layout.mds == Some(placement::MdsParams { n: 6, k: 5 });
    let d = DemandVector::distinct(&net, 6)?;
    let report = delivery::load_report(&delivery::build_delivery(&net, &layout, &d)?);
    ok &= report.max_link_load == rat::rat(3, 5);
    let run = verify::simulate(&net, &layout, &d, 100, 7)?;
    ok &= run.ok;
    ok &= bounds::reference::enhanced_cutset_h4_r2() == report.max_link_load;
    Ok((
        ok,
        format!(
            "M={} load={}; baseline {}, enhanced bound {}, uncoded-placement bound {}",
            rat::display(&layout.memory),
            rat::display(&report.max_link_load),
            rat::display(&bounds::reference::baseline_load_h4_r2()),
            rat::display(&bounds::reference::enhanced_cutset_h4_r2()),
            rat::display(&bounds::reference::uncoded_placement_bound_h4_r2()),
        ),
    ))
}

fn fixture_optimality_sweep() -> Result<(bool, String)> {
    let mut checked = 0;
    for relays in 2..=8usize {
        for degree in 2..=relays {
            let rep = bounds::optimality_check(relays, degree, 12)?;
            if !rep.pass {
                return Ok((false, format!("H={relays} r={degree} failed")));
            }
            checked += 1;
        }
    }
    Ok((
        true,
        format!("{checked} (H, r) pairs optimal at the corner"),
    ))
}

fn fixture_memory_comparison_sweep() -> Result<(bool, String)> {
    let mut checked = 0;
    let mut violations = Vec::new();
    for relays in 3..=10usize {
        for degree in 2..relays {
            let cmp = bounds::min_memory_comparison(relays, degree)?;
            for e in cmp
                .entries
                .iter()
                .filter(|e| e.claimed && !e.strictly_smaller)
            {
                violations.push(format!(
                    "H={relays} r={degree} g={}: coded {} vs baseline {}",
                    e.gain,
                    rat::display(&e.coded_memory),
                    rat::display(&e.baseline_memory)
                ));
            }
            checked += cmp.entries.len();
        }
    }
    if violations.is_empty() {
        Ok((true, format!("{checked} (H, r, g) entries verified")))
    } else {
        Ok((
            false,
            format!(
                "{} of {checked} claimed entries not strictly smaller: {}",
                violations.len(),
                violations.join("; ")
            ),
        ))
    }
}

fn fixture_pruned_count_oracle() -> Result<(bool, String)> {
    let budget = 100_000u64;
    let mut checked = 0;
    for relays in 3..=6usize {
        for degree in 2..=relays {
            let net = CombinationNetwork::build(relays, degree)?;
            let k2 = net.placement_subset_count();
            for q in 1..=k2 {
                if combinatorics::collection_count(&net, q) > num::BigUint::from(budget) {
                    continue;
                }
                let formula = pruned_cached_per_user(relays, degree, q);
                for user in 1..=net.user_count() {
                    let oracle = pruned_cached_per_user_bruteforce(&net, q, user)?;
                    if num::BigUint::from(oracle) != formula {
                        return Ok((
                            false,
                            format!(
                                "H={relays} r={degree} q={q} user={user}: {oracle} vs {formula}"
                            ),
                        ));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok((true, format!("{checked} (H, r, q, k) cases matched")))
}

fn fixture_class_census() -> Result<(bool, String)> {
    let mut checked = 0;
    for (relays, degree) in [(4usize, 2usize), (5, 3), (6, 3)] {
        let net = CombinationNetwork::build(relays, degree)?;
        let k1 = net.users_per_relay() as i128;
        let k2 = net.placement_subset_count() as i128;
        for q in 1..=3usize {
            let expect_cached = combinatorics::binom(k2 - degree as i128, q as i128);
            let expect_delivered =
                num::BigUint::from(degree) * combinatorics::binom(k1 - 1, q as i128 - 1);
            for user in 1..=net.user_count() {
                let (cached, delivered, ignored) = combinatorics::class_census(&net, q, user)?;
                let total_ok = num::BigUint::from(cached + delivered + ignored)
                    == combinatorics::collection_count(&net, q);
                if num::BigUint::from(cached) != expect_cached
                    || num::BigUint::from(delivered) != expect_delivered
                    || !total_ok
                {
                    return Ok((false, format!("H={relays} r={degree} q={q} user={user}")));
                }
                checked += 1;
            }
        }
    }
    Ok((true, format!("{checked} censuses matched closed forms")))
}

fn cmd_fixtures(a: FixturesArgs) -> Result<i32> {
    type FixtureFn = fn() -> Result<(bool, String)>;
    let all: Vec<(&'static str, FixtureFn)> = vec![
        ("example1", fixture_example1),
        ("example2", fixture_example2),
        ("optimality-sweep", fixture_optimality_sweep),
        ("memory-comparison-sweep", fixture_memory_comparison_sweep),
        ("pruned-count-oracle", fixture_pruned_count_oracle),
        ("class-census", fixture_class_census),
    ];
    let selected: Vec<_> = all
        .into_iter()
        .filter(|(name, _)| {
            a.only
                .as_ref()
                .map(|pat| name.contains(pat.as_str()))
                .unwrap_or(true)
        })
        .collect();
    if selected.is_empty() {
        return Err(Error::Parameter(format!(
            "no fixture matches '{}'",
            a.only.unwrap_or_default()
        )));
    }

    let results: Vec<FixtureResult> = selected
        .into_iter()
        .map(|(name, f)| fixture(name, f))
        .collect();
    let all_pass = results.iter().all(|r| r.pass);

    if a.json {
        let value = json!(results
            .iter()
            .map(|r| json!({
                "name": r.name,
                "pass": r.pass,
                "detail": r.detail,
                "millis": r.millis,
            }))
            .collect::<Vec<_>>());
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        for r in &results {
            println!(
                "{} {:<26} {:>6} ms  {}",
                if r.pass { "PASS" } else { "FAIL" },
                r.name,
                r.millis,
                r.detail
            );
        }
        println!("verdict: {}", if all_pass { "PASS" } else { "FAIL" });
    }
    Ok(if all_pass { 0 } else { 1 })
}
