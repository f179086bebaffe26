use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use feyngraph::brauer::{compose_brauer, tensor_brauer, wiring_port_labels, wiring_to_graph};
use feyngraph::canon::{find_iso, Decor};
use feyngraph::circuit::{check_circuit_axioms, check_modular_axioms};
use feyngraph::etale::{glue_ports, EtaleMorphism};
use feyngraph::free::{self, Law, Level};
use feyngraph::io::{self, read_json, to_pretty};
use feyngraph::nerve::{check_segal, nerve};
use feyngraph::pointed::hom_pointed;
use feyngraph::report::Report;
use feyngraph::species::{evaluate_species, Species};
use feyngraph::substitution::{enumerate_x_graphs, substitute, Bounds};
use feyngraph::{Error, Graph};

#[derive(Parser)]
#[command(name = "feyngraph", version, about = "Feynman graphs, substitution and circuit algebras at finite scale")]
struct Cli {
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file and print its shape.
    Validate { graph: PathBuf },
    /// Look for an isomorphism between two graphs.
    Iso { g: PathBuf, h: PathBuf },
    /// Glue pairs of ports, given as `e:f` by edge id.
    Glue {
        graph: PathBuf,
        #[arg(long = "pair", required = true)]
        pairs: Vec<String>,
    },
    /// Substitute a graph of graphs.
    Substitute { gog: PathBuf },
    /// Enumerate X-graphs up to isomorphism.
    Enumerate {
        #[arg(long)]
        x: usize,
        #[arg(long, default_value_t = 2)]
        max_vertices: usize,
        #[arg(long, default_value_t = 3)]
        max_valency: usize,
        #[arg(long)]
        connected: bool,
        #[arg(long)]
        admissible: bool,
    },
    /// Brauer diagrams and wiring diagrams.
    Brauer {
        #[command(subcommand)]
        op: BrauerOp,
    },
    /// Decorations of a graph by a species.
    Eval {
        species: PathBuf,
        graph: PathBuf,
        /// `{edge: colour}` fixing port colours.
        #[arg(long)]
        ports: Option<PathBuf>,
    },
    /// Check the circuit algebra axioms.
    CheckCa { algebra: PathBuf },
    /// Check the modular operad axioms.
    CheckMo { operad: PathBuf },
    /// List the free construction at one arity.
    Free {
        #[arg(long, value_parser = parse_level)]
        level: Level,
        #[arg(long)]
        species: Option<PathBuf>,
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value_t = 1)]
        max_vertices: usize,
    },
    /// Check Beck's axioms for one distributive law.
    Law {
        law: LawArg,
        #[arg(long)]
        species: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_base_vertices: usize,
    },
    /// Check the Yang-Baxter condition on TDL.
    YbSweep {
        #[arg(long)]
        species: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_base_vertices: usize,
    },
    /// List the pointed maps between two graphs.
    PointedHom { g: PathBuf, h: PathBuf },
    /// The nerve of a circuit algebra on a corpus directory of graphs.
    Nerve {
        algebra: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Check the Segal condition for a presheaf file.
    Segal { presheaf: PathBuf },
}

#[derive(Subcommand)]
enum BrauerOp {
    /// `g ∘ f`, where f is applied first.
    Compose { g: PathBuf, f: PathBuf },
    Tensor { a: PathBuf, b: PathBuf },
    /// The graph of a wiring diagram.
    ToGraph { wiring: PathBuf },
    /// Whether a diagram is downward.
    Downward { diagram: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Dt,
    Lt,
    Ld,
}

fn parse_level(s: &str) -> Result<Level, String> {
    Level::parse(s).map_err(|e| e.to_string())
}

/// Output text and whether the run counts as a pass.
type Outcome = (String, bool);

fn graph_at(p: &Path) -> feyngraph::Result<Graph> {
    io::parse_graph(&read_json(p)?)
}

fn species_or_terminal(p: &Option<PathBuf>) -> feyngraph::Result<Species> {
    match p {
        Some(p) => io::parse_species(&read_json(p)?),
        None => Ok(Species::terminal(3)),
    }
}

fn report(r: Report) -> Outcome {
    let ok = r.passed();
    (r.render(), ok)
}

fn budgets(k: usize) -> Vec<usize> {
    vec![k, k.saturating_sub(1).max(1), k.saturating_sub(2).max(1)]
}

fn run(cmd: &Command) -> feyngraph::Result<Outcome> {
    Ok(match cmd {
        Command::Validate { graph } => {
            let g = graph_at(graph)?;
            let text = format!(
                "edges={} half_edges={} vertices={} ports={} inner_orbits={} components={}\n",
                g.n_edges(),
                g.n_halves(),
                g.n_vertices(),
                g.ports().len(),
                g.inner_edges().len() / 2,
                g.component_count()
            );
            (text, true)
        }
        Command::Iso { g, h } => {
            let (g, h) = (graph_at(g)?, graph_at(h)?);
            match find_iso(&g, Decor::default(), &h, Decor::default()) {
                Some(m) => {
                    let f = EtaleMorphism { source: g, target: h, edges: m.edges, halves: m.halves, vertices: m.vertices };
                    (to_pretty(&io::morphism_to_json(&f)), true)
                }
                None => ("not isomorphic\n".into(), false),
            }
        }
        Command::Glue { graph, pairs } => {
            let g = graph_at(graph)?;
            let mut ps = Vec::new();
            for p in pairs {
                let (a, b) = p.split_once(':').ok_or_else(|| Error::Parse(format!("pair {p} is not e:f")))?;
                ps.push((g.edge_id(a)?, g.edge_id(b)?));
            }
            let (h, _) = glue_ports(&g, &ps)?;
            (to_pretty(&io::graph_to_json(&h)), true)
        }
        Command::Substitute { gog } => {
            let gg = io::parse_gog(&read_json(gog)?)?;
            (to_pretty(&io::graph_to_json(&substitute(&gg)?.graph)), true)
        }
        Command::Enumerate { x, max_vertices, max_valency, connected, admissible } => {
            let bounds = Bounds {
                max_vertices: *max_vertices,
                max_valency: *max_valency,
                connected_only: *connected,
                admissible_only: *admissible,
            };
            let found = enumerate_x_graphs(*x, bounds)?;
            let list: Vec<_> = found
                .iter()
                .map(|xg| {
                    let labels: serde_json::Map<String, serde_json::Value> =
                        xg.labels.iter().map(|(&e, &l)| (xg.graph.edge_name(e).to_string(), json!(l + 1))).collect();
                    json!({"graph": io::graph_to_json(&xg.graph), "labels": labels})
                })
                .collect();
            (to_pretty(&json!({"count": found.len(), "graphs": list})), true)
        }
        Command::Brauer { op } => match op {
            BrauerOp::Compose { g, f } => {
                let g = io::parse_diagram(&read_json(g)?)?;
                let f = io::parse_diagram(&read_json(f)?)?;
                (to_pretty(&io::diagram_to_json(&compose_brauer(&g, &f)?)), true)
            }
            BrauerOp::Tensor { a, b } => {
                let a = io::parse_diagram(&read_json(a)?)?;
                let b = io::parse_diagram(&read_json(b)?)?;
                (to_pretty(&io::diagram_to_json(&tensor_brauer(&a, &b))), true)
            }
            BrauerOp::ToGraph { wiring } => {
                let w = io::parse_wiring(&read_json(wiring)?)?;
                let g = wiring_to_graph(&w);
                let labels: serde_json::Map<String, serde_json::Value> = wiring_port_labels(&w)
                    .into_iter()
                    .map(|(e, l)| (g.edge_name(e).to_string(), json!(l + 1)))
                    .collect();
                (to_pretty(&json!({"graph": io::graph_to_json(&g), "labels": labels})), true)
            }
            BrauerOp::Downward { diagram } => {
                let d = io::parse_diagram(&read_json(diagram)?)?;
                let down = d.is_downward();
                (format!("downward={down}\n"), down)
            }
        },
        Command::Eval { species, graph, ports } => {
            let s = io::parse_species(&read_json(species)?)?;
            let g = graph_at(graph)?;
            let pc = match ports {
                Some(p) => Some(io::parse_port_colours(&s, &g, &read_json(p)?)?),
                None => None,
            };
            let ds = evaluate_species(&s, &g, pc.as_ref())?;
            let list: Vec<_> = ds.iter().map(|d| io::decoration_to_json(&s, &g, d)).collect();
            (to_pretty(&json!({"count": ds.len(), "decorations": list})), true)
        }
        Command::CheckCa { algebra } => report(check_circuit_axioms(&io::parse_algebra(&read_json(algebra)?)?)),
        Command::CheckMo { operad } => report(check_modular_axioms(&io::parse_modular(&read_json(operad)?)?)),
        Command::Free { level, species, arity, max_vertices } => {
            let s = species_or_terminal(species)?;
            let vals = free::free_apply(&s, *level, *arity, *max_vertices)?;
            let mut text = format!("level={} arity={arity} count={}\n", level.word(), vals.len());
            for v in &vals {
                text.push_str(&free::render(&s, v));
                text.push('\n');
            }
            (text, true)
        }
        Command::Law { law, species, max_base_vertices } => {
            let s = species_or_terminal(species)?;
            let law = match law {
                LawArg::Dt => Law::DT,
                LawArg::Lt => Law::LT,
                LawArg::Ld => Law::LD,
            };
            report(free::beck_sweep(&s, law, &budgets(*max_base_vertices), s.nmax, s.nmax)?)
        }
        Command::YbSweep { species, max_base_vertices } => {
            let s = species_or_terminal(species)?;
            report(free::yang_baxter_sweep(&s, &budgets(*max_base_vertices), s.nmax, s.nmax)?)
        }
        Command::PointedHom { g, h } => {
            let (g, h) = (graph_at(g)?, graph_at(h)?);
            let maps = hom_pointed(&g, &h)?;
            let list: Vec<_> = maps.iter().map(io::pointed_to_json).collect();
            (to_pretty(&json!({"count": maps.len(), "maps": list})), true)
        }
        Command::Nerve { algebra, corpus } => {
            let ca = io::parse_algebra(&read_json(algebra)?)?;
            let mut files: Vec<PathBuf> = std::fs::read_dir(corpus)
                .map_err(|e| Error::Parse(format!("{}: {e}", corpus.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            let mut graphs = Vec::new();
            for f in &files {
                let name = f.file_stem().unwrap().to_string_lossy().to_string();
                graphs.push((name, graph_at(f)?));
            }
            (to_pretty(&io::presheaf_to_json(&nerve(&ca, &graphs)?)), true)
        }
        Command::Segal { presheaf } => report(check_segal(&io::parse_presheaf(&read_json(presheaf)?)?)?),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((text, ok)) => {
            match &cli.output {
                Some(p) => {
                    if let Err(e) = std::fs::write(p, &text) {
                        eprintln!("error: {}: {e}", p.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

