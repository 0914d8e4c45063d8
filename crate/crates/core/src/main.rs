use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use reebedit::edit::{self, Coupling};
use reebedit::generate::{self, InstanceSpec};
use reebedit::io::{self, CandidateFile, ComplexFile, GraphFile, Witness};
use reebedit::metrics;
use reebedit::scalar::{self, Scalar};
use reebedit::{compute_reeb, Error, ReebGraph};

#[derive(Parser)]
#[command(name = "reebedit", version, about = "Reeb graphs and certified edit-distance bounds")]
struct Cli {
    /// Directory for written files; relative output paths resolve against it.
    #[arg(long, global = true, env = "REEB_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reeb graph of a complex with a function; prints graph JSON.
    Reeb {
        input: PathBuf,
        /// Also write the graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Re-runs the Reeb quotient checks on every map of a witness.
    Verify { witness: PathBuf },
    /// `d_f` between two points of a graph, written `n3` or `e2@1/2`.
    Metric { graph: PathBuf, x: String, y: String },
    /// Distortion and value defects of a candidate pair `φ, ψ`.
    Distortion {
        candidates: PathBuf,
        /// Interior sample points per edge.
        #[arg(long, default_value_t = 1)]
        density: usize,
        /// Also sample at all critical values.
        #[arg(long)]
        refine: bool,
        /// Write the correspondence table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Upper bound on the edit distance from a coupling, a product or a point.
    Bound(BoundArgs),
    /// Cost of a zigzag or coupling witness; its maps are certified on load.
    Zigzag {
        witness: PathBuf,
        #[arg(long)]
        certify: bool,
        /// Write the witness back with its cost and maximizer.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zigzag through the straight-line homotopy between two functions on one complex.
    Homotopy {
        f: PathBuf,
        g: PathBuf,
        #[arg(long)]
        certify: bool,
        #[arg(long, default_value = "homotopy.json")]
        out: PathBuf,
    },
    /// Writes a generated instance.
    Generate(GenerateArgs),
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["coupling", "product", "point"])))]
struct BoundArgs {
    /// Coupling witness.
    #[arg(long)]
    coupling: Option<PathBuf>,
    /// Two graph files; bound of their product coupling.
    #[arg(long, num_args = 2, value_names = ["F", "G"])]
    product: Option<Vec<PathBuf>>,
    /// A graph file and a value `c`; distance to the one-point graph.
    #[arg(long, num_args = 2, value_names = ["GRAPH", "C"])]
    point: Option<Vec<String>>,
    #[arg(long)]
    certify: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Cylinder,
    Circle,
    Path,
    Point,
    Random,
}

#[derive(Args)]
struct GenerateArgs {
    generator: Generator,
    /// Polygon resolution, or path length.
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value = "0")]
    c: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    vertices: usize,
    #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
    lo: i64,
    #[arg(long, default_value_t = 5, allow_hyphen_values = true)]
    hi: i64,
    /// File name prefix; defaults to the generator name.
    #[arg(long)]
    prefix: Option<String>,
}

/// Failures, split by exit code.
enum Failure {
    Axiom(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotCertified(_) | Error::Commutation { .. } | Error::Mismatch(_) | Error::InvalidMap(_) => {
                Failure::Axiom(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Axiom(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn read<T: for<'de> Deserialize<'de>>(path: &Path) -> std::result::Result<T, Failure> {
    io::read_json(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> std::result::Result<Arc<ReebGraph>, Failure> {
    Ok(Arc::new(read::<GraphFile>(path)?.build()?))
}

fn out_path(cli: &Cli, p: &Path) -> PathBuf {
    cli.out_dir.join(p)
}

fn write<T: serde::Serialize>(cli: &Cli, name: &Path, value: &T) -> Outcome {
    let path = out_path(cli, name);
    io::write_json(&path, value).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_text(cli: &Cli, name: &Path, text: &str) -> Outcome {
    let path = out_path(cli, name);
    std::fs::write(&path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Reeb { input, dot } => {
            let (k, f) = read::<ComplexFile>(input)?.build()?;
            let (g, _) = compute_reeb(&k, &f)?;
            print!("{}", io::to_json(&GraphFile::new(&g)));
            eprintln!("nodes = {}, edges = {}, betti-1 = {}", g.node_count(), g.edge_count(), g.betti_1());
            if let Some(d) = dot {
                write_text(cli, d, &g.to_dot())?;
            }
        }
        Command::Verify { witness } => {
            let w: Witness = read(witness)?;
            let legs = w.legs()?;
            let mut checked = 0;
            for (l, r) in &legs {
                l.verify().map_err(Error::from)?;
                r.verify().map_err(Error::from)?;
                checked += 2;
            }
            println!("OK: {checked} maps certified");
        }
        Command::Metric { graph, x, y } => {
            let g = read_graph(graph)?;
            let (x, y) = (io::parse_point(x)?, io::parse_point(y)?);
            g.check_point(&x)?;
            g.check_point(&y)?;
            println!("{}", scalar::format(&metrics::d_f(&g, &x, &y)?));
        }
        Command::Distortion { candidates, density, refine, csv } => {
            let (phi, psi) = read::<CandidateFile>(candidates)?.build()?;
            let d = metrics::distortion_with(&phi, &psi, *density, *refine)?;
            println!("distortion = {}", scalar::format(&d.distortion));
            println!("defect phi = {}", scalar::format(&d.defect_phi));
            println!("defect psi = {}", scalar::format(&d.defect_psi));
            println!("bound = {}{}", scalar::format(&d.bound()), if d.tight { "" } else { " (sampled)" });
            if let Some(p) = csv {
                write_text(cli, p, &d.to_csv())?;
            }
        }
        Command::Bound(args) => bound(args)?,
        Command::Zigzag { witness, certify, out } => {
            let w: Witness = read(witness)?;
            let z = w.zigzag()?;
            let cost = edit::zigzag_cost(&z)?;
            println!("{}", scalar::format(&cost.cost));
            if *certify {
                if let Some(stated) = &w.cost {
                    if scalar::parse(stated)? != cost.cost {
                        return Err(Failure::Axiom(format!("witness states cost {stated}")));
                    }
                }
                println!("{} maps certified: OK", 2 * z.legs().len());
            }
            if let Some(o) = out {
                write(cli, o, &Witness::from_zigzag(&z, Some(&cost)))?;
            }
        }
        Command::Homotopy { f, g, certify, out } => {
            let (k, f) = read::<ComplexFile>(f)?.build()?;
            let (k2, g) = read::<ComplexFile>(g)?.build()?;
            if k.simplices() != k2.simplices() {
                return Err(Failure::Usage("the two functions live on different complexes".into()));
            }
            let h = edit::build_homotopy_zigzag(&k, &f, &g)?;
            let witness = Witness::from_zigzag(&h.zigzag, Some(&h.cost));
            write(cli, out, &witness)?;
            let sup = f.sup_distance(&g);
            println!("stages = {}", h.zigzag.legs().len());
            println!("cost = {}", scalar::format(&h.cost.cost));
            println!("sup |f - g| = {}", scalar::format(&sup));
            if *certify {
                let back: Witness = read(&out_path(cli, out))?;
                let z = back.zigzag()?;
                let again = edit::zigzag_cost(&z)?.cost;
                if again != h.cost.cost || again > sup {
                    return Err(Failure::Axiom(format!(
                        "cost {} exceeds ‖f−g‖∞ = {}",
                        scalar::format(&again),
                        scalar::format(&sup)
                    )));
                }
                println!("cost ≤ ‖f−g‖∞: OK");
            }
        }
        Command::Generate(args) => generate_files(cli, args)?,
    }
    Ok(())
}

fn bound(args: &BoundArgs) -> Outcome {
    let value: Scalar = if let Some(path) = &args.coupling {
        let w: Witness = read(path)?;
        let legs = w.legs()?;
        let [(l, r)] = &legs[..] else {
            return Err(Failure::Usage("witness is not a single coupling".into()));
        };
        let b = l.value_defect(r.values());
        if args.certify {
            w.coupling()?;
            eprintln!("coupling maps certified: OK");
        }
        b
    } else if let Some(paths) = &args.product {
        let (f, g) = (read_graph(&paths[0])?, read_graph(&paths[1])?);
        let b = edit::product_bound(&f, &g);
        if args.certify {
            let c = edit::product_coupling(&f, &g)?;
            if edit::coupling_bound(&c) != b {
                return Err(Failure::Axiom("product coupling disagrees with its closed form".into()));
            }
            eprintln!("product coupling certified: OK");
        }
        b
    } else if let Some(parts) = &args.point {
        let g = read_graph(Path::new(&parts[0]))?;
        let c = scalar::parse(&parts[1])?;
        let b = edit::point_distance(&g, &c);
        if args.certify {
            let point = Arc::new(ReebGraph::point(c));
            let pc = edit::product_coupling(&g, &point)?;
            if edit::coupling_bound(&pc) != b {
                return Err(Failure::Axiom("point coupling disagrees with the distance".into()));
            }
            eprintln!("point coupling certified: OK");
        }
        b
    } else {
        unreachable!("clap requires one source")
    };
    println!("{}", scalar::format(&value));
    Ok(())
}

fn generate_files(cli: &Cli, a: &GenerateArgs) -> Outcome {
    let spec = match a.generator {
        Generator::Cylinder => InstanceSpec::Cylinder { n: a.n },
        Generator::Circle => InstanceSpec::Circle { n: a.n },
        Generator::Path => InstanceSpec::Path { n: a.n },
        Generator::Point => InstanceSpec::Point { c: scalar::parse(&a.c)? },
        Generator::Random => InstanceSpec::Random { seed: a.seed, vertices: a.vertices, lo: a.lo, hi: a.hi },
    };
    let inst = generate::generate(&spec)?;
    let prefix = a
        .prefix
        .clone()
        .unwrap_or_else(|| a.generator.to_possible_value().expect("no skipped variants").get_name().to_string());
    let mut written = Vec::new();
    for (f, tag) in inst.functions.iter().zip(["f", "g"]) {
        let name = PathBuf::from(format!("{prefix}_{tag}.json"));
        write(cli, &name, &ComplexFile::new(&inst.complex, f))?;
        written.push(name);
    }
    if matches!(a.generator, Generator::Cylinder) {
        let maps = generate::cylinder_maps(&inst)?;
        let coupling = Coupling::new(maps.p_f, maps.p_g)?;
        let name = PathBuf::from(format!("{prefix}.json"));
        write(cli, &name, &Witness::from_coupling(&coupling))?;
        written.push(name);
        let name = PathBuf::from(format!("{prefix}_candidates.json"));
        write(cli, &name, &CandidateFile::new(&maps.phi, &maps.psi))?;
        written.push(name);
    }
    for name in written {
        println!("{}", out_path(cli, &name).display());
    }
    Ok(())
}
