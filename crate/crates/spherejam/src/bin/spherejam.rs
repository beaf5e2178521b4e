//! Thin command-line front end over the library. Exit codes: 0 on success,
//! 2 on malformed input, 3 on numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spherejam::container::{Configuration, ConstraintSet, Container};
use spherejam::docs::{CatalogDocument, RunConfigDocument};
use spherejam::error::Error;
use spherejam::multistart::{self, CampaignParams};
use spherejam::optimizer::{self, OptimizerParams};
use spherejam::{docs, envelope, render, verify};

#[derive(Parser)]
#[command(name = "spherejam", version, about = "Jammed sphere packings in convex containers")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Container: `cube`, `triangle2`, or `polytope:<walls-file>`.
    #[arg(long, global = true, default_value = "cube")]
    container: String,

    /// Number of spheres.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Ambient dimension.
    #[arg(long, global = true, default_value_t = 2)]
    d: usize,

    /// JSON run configuration; flags override nothing once given.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path (meaning depends on the subcommand).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for campaigns.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the maximal radius function at a configuration file.
    Evaluate {
        input: PathBuf,
        /// Active-set tolerance for the report.
        #[arg(long, default_value_t = 1e-7)]
        epsilon: f64,
    },
    /// Ascend to a local maximum from a start file or a random start.
    Maximize {
        #[arg(long)]
        start: Option<PathBuf>,
    },
    /// Multistart campaign; writes a catalog and a radius histogram.
    Campaign {
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Refine and certify every entry of a catalog.
    Verify { catalog: PathBuf },
    /// Draw a catalog entry: SVG for d = 2, DOT otherwise.
    Render {
        catalog: PathBuf,
        #[arg(long, default_value_t = 0)]
        entry: usize,
    },
    /// Print the polynomial contact system of a catalog entry.
    EmitSystem {
        catalog: PathBuf,
        #[arg(long, default_value_t = 0)]
        entry: usize,
    },
}

fn container_from_flag(spec: &str, d: usize) -> Result<Container, Error> {
    if let Some(path) = spec.strip_prefix("polytope:") {
        let text = std::fs::read_to_string(path)?;
        Container::parse_polytope(d, &text)
    } else {
        Container::preset(spec, d)
    }
}

struct Setup {
    cs: ConstraintSet,
    seed: u64,
    campaign: CampaignParams,
    out: Option<PathBuf>,
}

fn setup(cli: &Cli) -> Result<Setup, Error> {
    if let Some(path) = &cli.config {
        let doc = RunConfigDocument::parse(&std::fs::read_to_string(path)?)?;
        let cs = doc.constraint_set()?;
        let mut campaign = doc.campaign_params();
        if cli.workers > 1 {
            campaign.workers = cli.workers;
        }
        let out = doc.out.clone().map(PathBuf::from).or_else(|| cli.out.clone());
        Ok(Setup {
            cs,
            seed: doc.seed,
            campaign,
            out,
        })
    } else {
        let n = cli
            .n
            .ok_or_else(|| Error::InvalidArgument("--n is required without --config".into()))?;
        let container = container_from_flag(&cli.container, cli.d)?;
        let cs = ConstraintSet::for_container(n, container)?;
        let campaign = CampaignParams {
            optimizer: OptimizerParams {
                rng_seed: cli.seed,
                ..OptimizerParams::default()
            },
            master_seed: cli.seed,
            workers: cli.workers,
            ..CampaignParams::default()
        };
        Ok(Setup {
            cs,
            seed: cli.seed,
            campaign,
            out: cli.out.clone(),
        })
    }
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_entry(doc: &CatalogDocument, entry: usize) -> Result<Configuration, Error> {
    let e = doc
        .entries
        .get(entry)
        .ok_or_else(|| Error::InvalidArgument(format!("no catalog entry {entry}")))?;
    Configuration::new(doc.n, doc.d, e.coordinates.clone())
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Evaluate { input, epsilon } => {
            let x = Configuration::parse(&std::fs::read_to_string(input)?)?;
            let container = container_from_flag(&cli.container, x.d())?;
            let cs = ConstraintSet::for_container(x.n(), container)?;
            let active = envelope::active_set(&cs, &x, *epsilon);
            println!("g = {:.17e}", active.g_value);
            println!("active ({} within {:.1e}):", active.len(), epsilon);
            for (id, v) in active.indices.iter().zip(&active.values) {
                println!("  {id}  {v:.17e}");
            }
            Ok(())
        }
        Command::Maximize { start } => {
            let s = setup(cli)?;
            let x0 = match start {
                Some(path) => Configuration::parse(&std::fs::read_to_string(path)?)?,
                None => {
                    use rand::SeedableRng;
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s.seed);
                    multistart::sample_start(s.cs.n(), s.cs.container(), &mut rng)?
                }
            };
            if x0.n() != s.cs.n() || x0.d() != s.cs.d() {
                return Err(Error::InvalidArgument("start does not match n, d".into()));
            }
            let record = optimizer::maximize(&s.cs, &x0, &s.campaign.optimizer)?;
            println!(
                "r = {:.17e}  active = {}  terminated by {}",
                record.radius,
                record.active.len(),
                record.terminated_by.as_str()
            );
            if let Some(out) = &s.out {
                let mut catalog = multistart::Catalog::new(&s.cs);
                catalog.total_runs = 1;
                let kind = multistart::SymmetryKind::for_container(s.cs.container());
                let ops = multistart::symmetry_elements(kind, s.cs.d());
                let is_cube =
                    s.cs.container().kind() == spherejam::container::ContainerKind::Cube;
                multistart::catalog_insert(&mut catalog, record, &s.campaign, &ops, is_cube);
                let doc = CatalogDocument::from_catalog(&catalog, &s.cs, s.seed);
                std::fs::write(out, doc.render())?;
                let trace_path = out.with_extension("trace.csv");
                std::fs::write(
                    &trace_path,
                    docs::trace_csv(&catalog.entries[0].record.trace),
                )?;
                println!("wrote {} and {}", out.display(), trace_path.display());
            }
            Ok(())
        }
        Command::Campaign { restarts } => {
            let mut s = setup(cli)?;
            if let Some(r) = restarts {
                s.campaign.restarts = *r;
            }
            let outcome = multistart::run_campaign(&s.cs, &s.campaign)?;
            let doc = CatalogDocument::from_catalog(&outcome.catalog, &s.cs, s.seed);
            println!(
                "{} restarts, {} failures, {} distinct maxima",
                outcome.catalog.total_runs,
                outcome.catalog.failures,
                doc.entries.len()
            );
            for e in &doc.entries {
                println!("  r = {:.12}  hits = {}", e.radius, e.hit_count);
            }
            let out = s.out.unwrap_or_else(|| PathBuf::from("catalog.json"));
            std::fs::write(&out, doc.render())?;
            let hist_path = out.with_extension("hist.csv");
            std::fs::write(&hist_path, docs::histogram_csv(&outcome.histogram))?;
            println!("wrote {} and {}", out.display(), hist_path.display());
            Ok(())
        }
        Command::Verify { catalog } => {
            let mut doc = CatalogDocument::parse(&std::fs::read_to_string(catalog)?)?;
            let container = doc.container_of()?;
            let cs = ConstraintSet::for_container(doc.n, container)?;
            doc.annotate(&cs);
            for (i, e) in doc.entries.iter().enumerate() {
                let jam = match e.fully_jammed {
                    Some(true) => "fully jammed",
                    Some(false) => "not fully jammed",
                    None => "not certified",
                };
                let poly = e.polynomial_match.as_deref().unwrap_or("no polynomial match");
                match (&e.verify_error, e.refined_radius) {
                    (Some(err), _) => println!("entry {i}: verification failed: {err}"),
                    (None, Some(r)) => println!("entry {i}: refined r = {r:.15}  {jam}  {poly}"),
                    (None, None) => println!("entry {i}: not refined"),
                }
            }
            let out = cli.out.clone().unwrap_or_else(|| catalog.clone());
            std::fs::write(&out, doc.render())?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Render { catalog, entry } => {
            let doc = CatalogDocument::parse(&std::fs::read_to_string(catalog)?)?;
            let x = load_entry(&doc, *entry)?;
            let e = &doc.entries[*entry];
            let graph = e.contact_graph.to_graph(verify::DEFAULT_CONTACT_TOL);
            let text = if doc.d == 2 {
                let container = doc.container_of()?;
                render::render_svg(&container, &x, e.radius, &graph)?
            } else {
                render::render_dot(doc.n, &graph)
            };
            write_or_print(&cli.out, &text)
        }
        Command::EmitSystem { catalog, entry } => {
            let doc = CatalogDocument::parse(&std::fs::read_to_string(catalog)?)?;
            let x = load_entry(&doc, *entry)?;
            let container = doc.container_of()?;
            let cs = ConstraintSet::for_container(doc.n, container)?;
            let e = &doc.entries[*entry];
            let graph = e.contact_graph.to_graph(verify::DEFAULT_CONTACT_TOL);
            let text = verify::emit_contact_system(&cs, &x, &graph)?;
            write_or_print(&cli.out, &text)
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_)
        | Error::InvalidContainer(_)
        | Error::MalformedInput(_)
        | Error::Io(_)
        | Error::Json(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
