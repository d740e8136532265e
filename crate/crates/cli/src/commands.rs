use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use fikit::families::{gaussian_endpoint_pairs, random_graph};
use fikit::hamiltonian::{conjugate_exponent, power_pair, ConvexOneDim, HamiltonianPair};
use fikit::hopf_lax::{hopf_lax, semigroup_check};
use fikit::inequalities::{
    hwi_coupling_check, hypercontractivity_curve, lsi_check, lsi_implies_talagrand_suite, phi_monitor,
    scaling_exponent_probe, talagrand_check, talagrand_dual_check, talagrand_implies_lsi_suite,
};
use fikit::io;
use fikit::report::{aggregate, markdown_table, CheckReport, Outcome};
use fikit::space::{build_graph, build_grid_1d, build_grid_2d, build_heisenberg_grid, MetricSpace, ProbabilityMeasure};
use fikit::transport::entropy_along_geodesic;

use crate::config::Resolver;
use crate::inputs::{self, FamilyParams};
use crate::{CheckArgs, CheckCmd, Cli, Command, GenArgs, HopflaxArgs, HopflaxCheck, Kind, SpaceCmd};

pub fn run(cli: Cli) -> Result<Option<Outcome>> {
    let mut r = Resolver::load(cli.config.as_deref())?;
    let env_seed = match std::env::var("FIKIT_SEED") {
        Ok(v) => v.parse::<u64>().map_err(|_| anyhow!("FIKIT_SEED={v:?} is not an unsigned integer"))?,
        Err(_) => 0,
    };
    let seed = r.or("seed", cli.seed, env_seed)?;
    r.record("threads", std::env::var("FIKIT_THREADS").ok())?;
    match cli.command {
        Command::Space { cmd: SpaceCmd::Gen(args) } => space_gen(r, args, seed).map(|_| None),
        Command::Hopflax(args) => hopflax(r, args),
        Command::Check { cmd } => check(r, cmd, seed).map(Some),
        Command::Report { dir } => report(&dir).map(Some),
    }
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn space_gen(mut r: Resolver, a: GenArgs, seed: u64) -> Result<()> {
    let kind: Kind = r.req("kind", a.kind)?;
    let space = match kind {
        Kind::Grid1d => build_grid_1d(r.req("a", a.a)?, r.req("b", a.b)?, r.req("n", a.n)?)?,
        Kind::Grid2d => build_grid_2d(
            r.req("ax", a.ax)?,
            r.req("bx", a.bx)?,
            r.req("nx", a.nx)?,
            r.req("ay", a.ay)?,
            r.req("by", a.by)?,
            r.req("ny", a.ny)?,
        )?,
        Kind::Graph => match r.opt::<PathBuf>("edges", a.edges)? {
            Some(path) => {
                let edges = io::read_edges(&path).with_context(|| format!("reading {}", path.display()))?;
                let n = edges.iter().map(|e| e.0.max(e.1) + 1).max().unwrap_or(0);
                build_graph(r.or("n", a.n, n)?, &edges)?
            }
            None => random_graph(r.req("n", a.n)?, seed)?,
        },
        Kind::Heisenberg => build_heisenberg_grid(r.req("levels", a.levels)?, r.req("step", a.step)?)?,
    };
    let out: PathBuf = r.req("out", a.out)?;
    io::write_space(&out, &space)?;
    r.write_lock(&parent_dir(&out), "space gen")?;
    println!(
        "wrote {} ({} points, kind {}{})",
        out.display(),
        space.len(),
        space.kind().as_str(),
        if space.is_approximate() { ", approximate" } else { "" }
    );
    Ok(())
}

fn load_space(r: &mut Resolver, flag: Option<PathBuf>) -> Result<MetricSpace> {
    let path: PathBuf = r.req("space", flag)?;
    io::read_space(&path).with_context(|| format!("reading space {}", path.display()))
}

fn hopflax(mut r: Resolver, a: HopflaxArgs) -> Result<Option<Outcome>> {
    let space = load_space(&mut r, a.space)?;
    let g_path: PathBuf = r.req("g", a.g)?;
    let g = fikit::space::ScalarField::new(io::read_field(&g_path, space.len())?)?;
    let t: f64 = r.req("t", a.t)?;
    let pair = match r.opt::<PathBuf>("h-table", a.h_table)? {
        Some(path) => {
            let tab = io::read_tabulated(&path, r.req("slope-bound", a.slope_bound)?)?;
            let v_grid = tab.grid().to_vec();
            // Past the last segment slope the supremum leaves the table.
            let last = tab.derivative(tab.v_max());
            let u_grid = inputs::parse_grid(&r.or("u-grid", a.u_grid, format!("0:{:?}:2001", 0.95 * last))?)?;
            HamiltonianPair::numeric(ConvexOneDim::Tabulated(tab), &u_grid, &v_grid)?
        }
        None => power_pair(r.or("q", a.q, 2.0)?)?,
    };
    let result = hopf_lax(&space, &g, t, &pair.l)?;
    let out: PathBuf = r.req("out", a.out)?;
    io::write_hopf_lax(&out, &result)?;
    let dir = r.or("out-dir", a.out_dir, parent_dir(&out))?;
    let mut outcome = None;
    if let Some(HopflaxCheck::Semigroup) = a.check {
        r.record("check", "semigroup")?;
        let s: f64 = r.req("s", a.s)?;
        std::fs::create_dir_all(&dir)?;
        let reports = semigroup_check(&space, &g, s, t, &pair.l)?;
        for rep in &reports {
            io::write_report(&dir, &rep.name, rep)?;
        }
        print!("{}", markdown_table(&reports));
        outcome = Some(aggregate(&reports));
    }
    r.write_lock(&dir, "hopflax")?;
    Ok(outcome)
}

struct Ctx {
    space: MetricSpace,
    mu: ProbabilityMeasure,
    dir: PathBuf,
    family: String,
    fp: FamilyParams,
}

impl Ctx {
    fn fields(&self) -> Result<Vec<fikit::space::ScalarField>> {
        inputs::fields(&self.space, &self.mu, &self.family, &self.fp)
    }

    fn measures(&self) -> Result<Vec<ProbabilityMeasure>> {
        inputs::measures(&self.space, &self.mu, &self.family, &self.fp)
    }
}

fn context(r: &mut Resolver, args: &CheckArgs, seed: u64, default_family: &str, q: f64) -> Result<Ctx> {
    let c = args.common.clone();
    let space = load_space(r, c.space)?;
    let arg = r.or("measure", c.measure, inputs::default_measure(&space).to_string())?;
    let mu = inputs::measure(&space, &arg)?;
    let dir: PathBuf = r.or("out-dir", c.out_dir, PathBuf::from("fikit-out"))?;
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let family = r.or("family", c.family, default_family.to_string())?;
    let fp = FamilyParams {
        count: r.or("count", c.count, 10)?,
        seed,
        lambdas: inputs::parse_grid(&r.or("lambdas", c.lambdas, "0.2:1:5".to_string())?)?,
        q,
    };
    Ok(Ctx { space, mu, dir, family, fp })
}

fn emit(dir: &Path, stem: &str, reports: &[CheckReport]) -> Result<Outcome> {
    if reports.is_empty() {
        bail!("the sample family is empty");
    }
    if reports.len() == 1 {
        io::write_report(dir, stem, &reports[0])?;
    } else {
        for (k, rep) in reports.iter().enumerate() {
            io::write_atomic(&dir.join(format!("{stem}_{k:03}.json")), rep.to_json().as_bytes())?;
        }
        io::write_atomic(&dir.join(format!("{stem}.md")), markdown_table(reports).as_bytes())?;
    }
    print!("{}", markdown_table(reports));
    Ok(aggregate(reports))
}

fn check(mut r: Resolver, cmd: CheckCmd, seed: u64) -> Result<Outcome> {
    let (name, args) = match &cmd {
        CheckCmd::Lsi(a) => ("lsi", a),
        CheckCmd::Talagrand(a) => ("talagrand", a),
        CheckCmd::DualTalagrand(a) => ("dual-talagrand", a),
        CheckCmd::Hc(a) => ("hc", a),
        CheckCmd::Phi(a) => ("phi", a),
        CheckCmd::Hwi(a) => ("hwi", a),
        CheckCmd::GeodesicEntropy(a) => ("geodesic-entropy", a),
        CheckCmd::Slopes(a) => ("slopes", a),
        CheckCmd::SuiteLsi2tal(a) => ("suite-lsi2tal", a),
        CheckCmd::SuiteTal2lsi(a) => ("suite-tal2lsi", a),
    };
    let k = &args.constants;
    // Exponents: q for LSI-side checks, p for transport-side checks.
    let (q, p) = match r.opt::<f64>("q", k.q)? {
        Some(q) => {
            let p = r.or("p", k.p, conjugate_exponent(q))?;
            if ((1.0 / p + 1.0 / q) - 1.0).abs() > 1e-12 {
                bail!("p = {p} and q = {q} are not conjugate");
            }
            (q, p)
        }
        None => {
            let p = r.or("p", k.p, 2.0)?;
            (r.or("q", None, conjugate_exponent(p))?, p)
        }
    };
    let kc: f64 = r.or("K", k.k, 1.0)?;
    let stem = name.replace('-', "_");
    let outcome = match cmd {
        CheckCmd::Lsi(_) => {
            let ctx = context(&mut r, args, seed, "exp", q)?;
            let reps = ctx.fields()?.iter().map(|f| lsi_check(&ctx.space, &ctx.mu, f, q, kc)).collect::<fikit::Result<Vec<_>>>()?;
            finish(&r, &ctx, name, emit(&ctx.dir, &stem, &reps)?)?
        }
        CheckCmd::Talagrand(_) => {
            let ctx = context(&mut r, args, seed, "trig", q)?;
            let reps = ctx
                .measures()?
                .iter()
                .map(|nu| talagrand_check(&ctx.space, &ctx.mu, nu, p, kc))
                .collect::<fikit::Result<Vec<_>>>()?;
            finish(&r, &ctx, name, emit(&ctx.dir, &stem, &reps)?)?
        }
        CheckCmd::DualTalagrand(_) => {
            let ctx = context(&mut r, args, seed, "lipschitz", q)?;
            let reps = ctx
                .fields()?
                .iter()
                .map(|f| talagrand_dual_check(&ctx.space, &ctx.mu, f, p, kc))
                .collect::<fikit::Result<Vec<_>>>()?;
            finish(&r, &ctx, name, emit(&ctx.dir, &stem, &reps)?)?
        }
        CheckCmd::Hc(_) => {
            let a = r.or("a", k.a, 1.0)?;
            // Default ρ makes a^{2-q} K^{q-1} = ρ (q-1) an equality.
            let rho = r.or("rho", k.rho, a.powf(2.0 - q) * kc.powf(q - 1.0) / (q - 1.0))?;
            let ts = inputs::parse_grid(&r.or("t-grid", k.t_grid.clone(), "0.1:1:10".to_string())?)?;
            let ctx = context(&mut r, args, seed, "lipschitz", q)?;
            let mut reps = Vec::new();
            for (i, f) in ctx.fields()?.iter().enumerate() {
                let (rep, curve) = hypercontractivity_curve(&ctx.space, &ctx.mu, f, a, rho, q, &ts)?;
                io::write_curve(&ctx.dir.join(format!("hc_{i:03}.csv")), &curve)?;
                reps.push(rep);
            }
            finish(&r, &ctx, name, emit(&ctx.dir, &stem, &reps)?)?
        }
        CheckCmd::Phi(_) => {
            let ts = inputs::parse_grid(&r.or("t-grid", k.t_grid.clone(), "0.1:1:10".to_string())?)?;
            let ctx = context(&mut r, args, seed, "lipschitz", q)?;
            let mut reps = Vec::new();
            for (i, f) in ctx.fields()?.iter().enumerate() {
                let (rep, curve) = phi_monitor(&ctx.space, &ctx.mu, f, kc, q, &ts)?;
                io::write_curve(&ctx.dir.join(format!("phi_{i:03}.csv")), &curve)?;
                reps.push(rep);
            }
            finish(&r, &ctx, name, emit(&ctx.dir, &stem, &reps)?)?
        }
        CheckCmd::Hwi(_) => {
            let ctx = context(&mut r, args, seed, "exp", q)?;
            let reps = ctx.fields()?.iter().map(|f| hwi_coupling_check(&ctx.space, &ctx.mu, f, p)).collect::<fikit::Result<Vec<_>>>()?;
            finish(&r, &ctx, name, emit(&ctx.dir, &stem, &reps)?)?
        }
        CheckCmd::GeodesicEntropy(_) => {
            let ts = inputs::parse_grid(&r.or("t-grid", k.t_grid.clone(), "0.1:0.9:9".to_string())?)?;
            let pairs = r.or("pairs", k.pairs, 10)?;
            let ctx = context(&mut r, args, seed, "exp", q)?;
            let reps = gaussian_endpoint_pairs(&ctx.space, pairs, seed)?
                .iter()
                .map(|(a, b)| entropy_along_geodesic(&ctx.mu, a, b, &ts, &ctx.space, p))
                .collect::<fikit::Result<Vec<_>>>()?;
            finish(&r, &ctx, name, emit(&ctx.dir, &stem, &reps)?)?
        }
        CheckCmd::Slopes(_) => {
            let eps = inputs::parse_grid(&r.or("eps-grid", k.eps_grid.clone(), "log:0.02:0.2:8".to_string())?)?;
            let ctx = context(&mut r, args, seed, "lipschitz", q)?;
            for (i, g) in ctx.fields()?.iter().enumerate() {
                let probe = scaling_exponent_probe(&ctx.space, &ctx.mu, g, p, &eps)?;
                io::write_atomic(
                    &ctx.dir.join(format!("slopes_{i:03}.probe.json")),
                    serde_json::to_string_pretty(&probe)?.as_bytes(),
                )?;
                println!("sample {i}: slope_ent = {:.4}, slope_wp = {:.4}", probe.slope_ent, probe.slope_wp);
            }
            finish(&r, &ctx, name, Outcome::Pass)?
        }
        CheckCmd::SuiteLsi2tal(_) => {
            let ctx = context(&mut r, args, seed, "trig", q)?;
            let rep = lsi_implies_talagrand_suite(&ctx.space, &ctx.mu, q, kc, &ctx.measures()?)?;
            finish(&r, &ctx, name, emit(&ctx.dir, &stem, &[rep])?)?
        }
        CheckCmd::SuiteTal2lsi(_) => {
            let ts = inputs::parse_grid(&r.or("t-grid", k.t_grid.clone(), "0.1:0.9:9".to_string())?)?;
            let pairs = r.or("pairs", k.pairs, 10)?;
            let ctx = context(&mut r, args, seed, "exp", q)?;
            let endpoints = gaussian_endpoint_pairs(&ctx.space, pairs, seed)?;
            let rep = talagrand_implies_lsi_suite(&ctx.space, &ctx.mu, p, kc, &ctx.fields()?, &endpoints, &ts)?;
            finish(&r, &ctx, name, emit(&ctx.dir, &stem, &[rep])?)?
        }
    };
    Ok(outcome)
}

fn finish(r: &Resolver, ctx: &Ctx, name: &str, outcome: Outcome) -> Result<Outcome> {
    r.write_lock(&ctx.dir, &format!("check {name}"))?;
    Ok(outcome)
}

fn report(dir: &Path) -> Result<Outcome> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.ends_with(".json") && name != "run.lock.json" && !name.ends_with(".probe.json")
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no JSON reports in {}", dir.display());
    }
    let reports = paths
        .iter()
        .map(|p| io::read_report(p).with_context(|| format!("parsing {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let table = markdown_table(&reports);
    io::write_atomic(&dir.join("summary.md"), table.as_bytes())?;
    print!("{table}");
    Ok(aggregate(&reports))
}
