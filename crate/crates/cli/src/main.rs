use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use yoneda_core::fixture::ChainMapFixture;
use yoneda_core::fuzz::{self, FuzzConfig};
use yoneda_core::ore::{build_ore_model_with_cap, minimality_report};
use yoneda_core::tor::{k2_verdict_with_dims, recheck_k2_witness, recheck_tor_nonzero};
use yoneda_core::{
    build_p_q, construct_chain_map, extend_presentation, koszul_verdict, mapping_cone, minimal_resolution,
    parse_ore, parse_presentation, tor_dims, validate_ore, verify_chain_map, Error, GradedModel, Presentation,
    Verdict,
};

const DEFAULT_CAP: usize = 200_000;

#[derive(Parser)]
#[command(name = "yoneda", version, about = "Exact Tor, Koszul and K2 checks for graded algebras and their Ore extensions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Homological degree bound I.
    #[arg(long, global = true)]
    max_hdeg: Option<usize>,
    /// Internal degree bound D.
    #[arg(long, global = true)]
    max_deg: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on the number of words of one degree.
    #[arg(long, global = true, env = "YONEDA_WORD_CAP", default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Re-verify every failure certificate from scratch.
    #[arg(long, global = true)]
    recheck: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Betti table of a minimal resolution of the trivial module.
    Resolve { algebra: PathBuf },
    /// Koszul verdict in the window.
    Koszul { algebra: PathBuf },
    /// K2 verdict in the window, with a kernel cycle on failure.
    K2 { algebra: PathBuf },
    /// Presentation of the Ore extension.
    OreExtend { algebra: PathBuf, ore: PathBuf },
    /// Chain map, mapping cone, exactness and minimality report.
    Cone {
        algebra: PathBuf,
        ore: PathBuf,
        /// Also write the resolution and chain map as a fixture file.
        #[arg(long)]
        write_fixture: Option<PathBuf>,
    },
    /// Checks a chain-map fixture.
    VerifyF { fixture: PathBuf },
    /// Bar-complex Tor against the minimal resolution.
    Crosscheck { algebra: PathBuf },
    /// Random Ore extensions checked for K2 consistency between A and B.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        count: u64,
        /// Also compare bar-complex Tor and check Tor^A -> Tor^B.
        #[arg(long)]
        bar_checks: bool,
    },
}

struct Ctx {
    max_hdeg: usize,
    max_deg: usize,
    format: Format,
    cap: usize,
    seed: u64,
    recheck: bool,
}

/// Outcome of a command: a report and whether it is a definitive failure.
struct Outcome {
    text: String,
    json: Value,
    failed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fuzz = matches!(cli.command, Command::Fuzz { .. });
    let ctx = Ctx {
        max_hdeg: cli.max_hdeg.unwrap_or(4),
        max_deg: cli.max_deg.unwrap_or(if fuzz { 5 } else { 8 }),
        format: cli.format,
        cap: cli.cap,
        seed: cli.seed,
        recheck: cli.recheck,
    };
    match run(&cli.command, &ctx) {
        Ok(out) => {
            match ctx.format {
                Format::Text => print!("{}", out.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("json")),
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::ResourceCap(_)) => 3,
                Some(Error::Consistency(_)) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_algebra(path: &Path) -> Result<Presentation> {
    parse_presentation(&read(path)?).with_context(|| path.display().to_string())
}

fn header(ctx: &Ctx) -> String {
    format!("window: (I, D) = ({}, {})\n", ctx.max_hdeg, ctx.max_deg)
}

fn window(ctx: &Ctx) -> Value {
    json!([ctx.max_hdeg, ctx.max_deg])
}

fn model(p: &Presentation, ctx: &Ctx) -> Result<Arc<GradedModel>> {
    if ctx.max_deg < 1 {
        bail!("--max-deg must be at least 1");
    }
    Ok(Arc::new(GradedModel::build_with_cap(p, ctx.max_deg, ctx.cap)?))
}

fn run(cmd: &Command, ctx: &Ctx) -> Result<Outcome> {
    match cmd {
        Command::Resolve { algebra } => resolve(algebra, ctx),
        Command::Koszul { algebra } => koszul(algebra, ctx),
        Command::K2 { algebra } => k2(algebra, ctx),
        Command::OreExtend { algebra, ore } => ore_extend(algebra, ore, ctx),
        Command::Cone {
            algebra,
            ore,
            write_fixture,
        } => cone(algebra, ore, write_fixture.as_deref(), ctx),
        Command::VerifyF { fixture } => verify_f(fixture, ctx),
        Command::Crosscheck { algebra } => crosscheck(algebra, ctx),
        Command::Fuzz { count, bar_checks } => run_fuzz(*count, *bar_checks, ctx),
    }
}

fn resolve(path: &Path, ctx: &Ctx) -> Result<Outcome> {
    let m = model(&load_algebra(path)?, ctx)?;
    let r = minimal_resolution(m, ctx.max_hdeg, ctx.max_deg)?;
    let b = r.betti_table();
    Ok(Outcome {
        text: format!("{}{b}", header(ctx)),
        json: json!({"command": "resolve", "window": window(ctx), "betti": b.to_json()}),
        failed: false,
    })
}

fn recheck_line(confirmed: bool) -> Result<String> {
    if !confirmed {
        bail!(Error::Consistency("the failure certificate did not re-verify".into()));
    }
    Ok("recheck: certificate confirmed\n".into())
}

fn verdict_outcome(command: &str, v: &Verdict, ctx: &Ctx, rechecked: Option<String>) -> Outcome {
    let mut text = format!("{}{command}: {v}\n", header(ctx));
    let mut json = v.to_json();
    json["command"] = json!(command);
    if let Some(line) = rechecked {
        text.push_str(&line);
        json["recheck"] = json!("confirmed");
    }
    Outcome {
        text,
        json,
        failed: !v.is_pass(),
    }
}

fn koszul(path: &Path, ctx: &Ctx) -> Result<Outcome> {
    let m = model(&load_algebra(path)?, ctx)?;
    let r = minimal_resolution(m.clone(), ctx.max_hdeg, ctx.max_deg)?;
    let v = koszul_verdict(&r.betti_table());
    let rechecked = match v.failure() {
        Some(cell) if ctx.recheck => Some(recheck_line(recheck_tor_nonzero(&m, cell)?)?),
        _ => None,
    };
    Ok(verdict_outcome("koszul", &v, ctx, rechecked))
}

fn k2(path: &Path, ctx: &Ctx) -> Result<Outcome> {
    let m = model(&load_algebra(path)?, ctx)?;
    let r = minimal_resolution(m.clone(), ctx.max_hdeg, ctx.max_deg)?;
    let v = k2_verdict_with_dims(m.clone(), &r.betti_table())?;
    let rechecked = match &v {
        Verdict::Fails {
            bidegree,
            witness: Some(w),
            ..
        } if ctx.recheck => {
            let fresh = model(m.presentation(), ctx)?;
            Some(recheck_line(recheck_k2_witness(fresh, *bidegree, w)?)?)
        }
        _ => None,
    };
    Ok(verdict_outcome("k2", &v, ctx, rechecked))
}

fn ore_extend(alg: &Path, ore_path: &Path, ctx: &Ctx) -> Result<Outcome> {
    let p = load_algebra(alg)?;
    let spec = parse_ore(&read(ore_path)?, &p).with_context(|| ore_path.display().to_string())?;
    let check = GradedModel::build_with_cap(&p, p.max_relation_degree().max(1) + 1, ctx.cap)?;
    let o = validate_ore(&spec, &check)?;
    let b = extend_presentation(&p, &o);
    let text = format!(
        "{}# sigma and delta checked on every relation\n{b}",
        header(ctx)
    );
    Ok(Outcome {
        text,
        json: json!({
            "command": "ore-extend",
            "window": window(ctx),
            "presentation": b.to_string(),
            "generators": b.generators,
            "relations": b.relations.iter().map(|r| r.display(&b.generators).to_string()).collect::<Vec<_>>(),
        }),
        failed: false,
    })
}

fn matrix_text(name: &str, rows: &[Vec<String>]) -> String {
    let mut out = format!("{name} =\n");
    for row in rows {
        out.push_str(&format!("  [ {} ]\n", row.join(", ")));
    }
    out
}

fn cone(alg: &Path, ore_path: &Path, fixture: Option<&Path>, ctx: &Ctx) -> Result<Outcome> {
    let p = load_algebra(alg)?;
    let ore_text = read(ore_path)?;
    let spec = parse_ore(&ore_text, &p).with_context(|| ore_path.display().to_string())?;
    let a = model(&p, ctx)?;
    let o = validate_ore(&spec, &a)?;
    let om = build_ore_model_with_cap(a.clone(), o, ctx.max_deg, ctx.cap)?;
    let r = minimal_resolution(a, ctx.max_hdeg, ctx.max_deg)?;
    let c = build_p_q(&r, &om)?;
    let homology = c.homology_check();
    let f = construct_chain_map(&c, &om)?;
    let check = verify_chain_map(&f, &c, &om)?;
    let cone = mapping_cone(&f, &c)?;
    let exact = cone.check_complex().and_then(|_| cone.check_exact());
    let report = minimality_report(&f);
    let fx = ChainMapFixture::from_computed(&alg.display().to_string(), &ore_text, &r, &om, &f);
    if let Some(path) = fixture {
        fs::write(path, fx.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    let failed = !homology.passed() || !check.ok || exact.is_err();
    let mut text = header(ctx);
    text.push_str(&format!(
        "P/Q homology: {}\n",
        if homology.passed() { "all cells as expected".to_string() } else { format!("{} failing cells", homology.failures().len()) }
    ));
    for m in &fx.chain_map {
        text.push_str(&matrix_text(&format!("f_{} {:?} -> {:?}", m.hdeg, m.source_degrees, m.target_degrees), &m.rows));
    }
    text.push_str(&format!(
        "chain map: {}\n",
        check.failure.clone().unwrap_or_else(|| "verified".into())
    ));
    text.push_str(&format!("cone generators:\n{}", cone.betti_table()));
    match &exact {
        Ok(()) => text.push_str("cone: exact in the window, H_0 = k\n"),
        Err(e) => text.push_str(&format!("cone: {e}\n")),
    }
    if report.is_empty() {
        text.push_str("minimality: no constant entries, the cone is minimal in the window\n");
    } else {
        text.push_str("minimality: constant entries\n");
        for e in &report {
            text.push_str(&format!("  f_{}[{}][{}] = {}\n", e.hdeg, e.row, e.col, e.constant));
        }
    }
    let json = json!({
        "command": "cone",
        "window": window(ctx),
        "homology_pq": {"passed": homology.passed(), "failures": homology.failures()},
        "chain_map": fx.chain_map,
        "chain_map_check": check,
        "cone": {"generators": cone.betti_table().to_json(), "exact": exact.is_ok()},
        "minimality": report,
    });
    Ok(Outcome { text, json, failed })
}

fn verify_f(path: &Path, ctx: &Ctx) -> Result<Outcome> {
    let fx = ChainMapFixture::from_json(&read(path)?).with_context(|| path.display().to_string())?;
    let run_check = || -> Result<_> {
        let l = fx.load()?;
        let res = l.resolution.check_complex().and_then(|_| l.resolution.check_exact());
        let homology = l.complexes.homology_check();
        let check = verify_chain_map(&l.chain_map, &l.complexes, &l.ore_model)?;
        Ok((l, res, homology, check))
    };
    let (l, res, homology, check) = run_check()?;
    let window = (l.resolution.max_hdeg(), l.resolution.max_deg());
    let report = minimality_report(&l.chain_map);
    let failed = res.is_err() || !homology.passed() || !check.ok;
    let mut text = format!("{}: {}\nwindow: (I, D) = ({}, {})\n", path.display(), fx.name, window.0, window.1);
    text.push_str(&format!(
        "resolution: {}\n",
        res.as_ref().map_or_else(|e| e.to_string(), |_| "exact in the window".into())
    ));
    text.push_str(&format!("P/Q homology: {}\n", if homology.passed() { "passed" } else { "FAILED" }));
    text.push_str(&format!(
        "chain map: {}\n",
        check.failure.clone().unwrap_or_else(|| "verified".into())
    ));
    for e in &report {
        text.push_str(&format!("constant entry f_{}[{}][{}] = {}\n", e.hdeg, e.row, e.col, e.constant));
    }
    let mut json = json!({
        "command": "verify-f",
        "name": fx.name,
        "window": [window.0, window.1],
        "resolution_exact": res.is_ok(),
        "homology_pq": homology.passed(),
        "chain_map_check": check,
        "minimality": report,
    });
    if failed && ctx.recheck {
        let (_, res2, homology2, check2) = run_check()?;
        text.push_str(&recheck_line(res2.is_err() == res.is_err() && homology2.passed() == homology.passed() && check2 == check)?);
        json["recheck"] = json!("confirmed");
    }
    Ok(Outcome { text, json, failed })
}

fn crosscheck(path: &Path, ctx: &Ctx) -> Result<Outcome> {
    let m = model(&load_algebra(path)?, ctx)?;
    let r = minimal_resolution(m.clone(), ctx.max_hdeg, ctx.max_deg)?;
    let betti = r.betti_table();
    let tor = tor_dims(&m, ctx.max_hdeg, ctx.max_deg)?;
    let mismatches: Vec<(usize, usize, usize, usize)> = (0..=ctx.max_hdeg)
        .flat_map(|i| (0..=ctx.max_deg).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let (x, y) = (betti.get(i, j), tor.get(i, j));
            (x != y).then_some((i, j, x, y))
        })
        .collect();
    let mut text = format!("{}resolution:\n{betti}bar complex:\n{tor}", header(ctx));
    if mismatches.is_empty() {
        text.push_str("crosscheck: all cells agree\n");
    }
    for (i, j, x, y) in &mismatches {
        text.push_str(&format!("crosscheck: cell ({i}, {j}) resolution {x}, bar {y}\n"));
    }
    let mut json = json!({
        "command": "crosscheck",
        "window": window(ctx),
        "resolution": betti.to_json(),
        "bar": tor.to_json(),
        "mismatches": mismatches.iter().map(|(i, j, x, y)| json!({"bidegree": [i, j], "resolution": x, "bar": y})).collect::<Vec<_>>(),
    });
    if let (Some(&(i, j, x, _)), true) = (mismatches.first(), ctx.recheck) {
        let fresh = model(m.presentation(), ctx)?;
        let again = minimal_resolution(fresh.clone(), ctx.max_hdeg, ctx.max_deg)?.betti_table().get(i, j);
        let bar = recheck_tor_nonzero(&fresh, (i, j))?;
        text.push_str(&recheck_line(again == x && bar == (tor.get(i, j) > 0))?);
        json["recheck"] = json!("confirmed");
    }
    Ok(Outcome {
        text,
        json,
        failed: !mismatches.is_empty(),
    })
}

fn run_fuzz(count: u64, bar_checks: bool, ctx: &Ctx) -> Result<Outcome> {
    if ctx.max_hdeg > 4 || ctx.max_deg > 6 || ctx.max_deg < 2 {
        bail!("fuzz windows are limited to I <= 4 and 2 <= D <= 6");
    }
    let cfg = FuzzConfig {
        max_hdeg: ctx.max_hdeg,
        max_deg: ctx.max_deg,
        ..FuzzConfig::default()
    };
    let mut text = header(ctx);
    let mut rows = Vec::new();
    let (mut both_pass, mut both_fail, mut bad) = (0, 0, 0);
    for index in 0..count {
        let inst = fuzz::generate(ctx.seed, index, &cfg)?;
        let r = fuzz::check_instance(&inst, &cfg, bar_checks)?;
        if r.ok() {
            if r.k2_a.is_pass() {
                both_pass += 1;
            } else {
                both_fail += 1;
            }
        } else {
            bad += 1;
            text.push_str(&format!("VIOLATION\n{}", fuzz::certificate(&r)));
            if ctx.recheck {
                let again = fuzz::recheck(ctx.seed, index, &cfg, bar_checks)?;
                text.push_str(&recheck_line(!again.ok())?);
            }
        }
        rows.push(json!({
            "index": index,
            "k2_a": r.k2_a.to_json(),
            "k2_b": r.k2_b.to_json(),
            "report": r,
        }));
    }
    text.push_str(&format!(
        "fuzz: seed {}, {count} instances: {both_pass} pass for A and B, {both_fail} fail for A and B, {bad} violations\n",
        ctx.seed
    ));
    Ok(Outcome {
        text,
        json: json!({
            "command": "fuzz",
            "window": window(ctx),
            "seed": ctx.seed,
            "instances": rows,
            "violations": bad,
        }),
        failed: bad > 0,
    })
}
