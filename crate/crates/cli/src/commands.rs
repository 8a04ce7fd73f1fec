use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use transit_epi_core::ingest::{generate_grid_feed, write_activities, write_gtfs_feed, GridFeedConfig};
use transit_epi_core::network::{degree_decompose, ContactGraph};
use transit_epi_core::report::{self, ThresholdRow};
use transit_epi_core::scenario::{
    load_data, parse_h_minutes, DataSource, GridSpec, ScenarioConfig, ScenarioFile, ScenarioRunner, Transmission,
    DEFAULT_SYNTHETIC_LOCATIONS, DEFAULT_SYNTHETIC_PERSONS,
};
use transit_epi_core::threshold::{percolation_oracle, threshold_report, InterventionAlpha};
use transit_epi_core::{generate_synthetic_population, PopulationDataset, TransitFeed};

use crate::args::{Command, DataArgs, GenerateArgs, ReplayArgs, SimulateArgs, ThresholdArgs};
use crate::error::{Class, CliError};
use crate::manifest::{digest_inputs, sha256_file, RunManifest};

/// Locations (homes included) for a synthetic town of `persons`.
pub fn locations_for(persons: usize) -> usize {
    let scaled = persons as f64 * DEFAULT_SYNTHETIC_LOCATIONS as f64 / DEFAULT_SYNTHETIC_PERSONS as f64;
    (scaled.round() as usize).max(4)
}

fn absolute(path: &Path) -> Result<PathBuf, CliError> {
    fs::canonicalize(path).map_err(|e| CliError::new(Class::Data, "MissingFile", format!("{}: {e}", path.display())))
}

/// Collects output files, writing each through one buffered writer.
struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Outputs { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn write<F>(&mut self, rel: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        std::io::Write::flush(&mut w).map_err(|e| CliError::io(&path, e))?;
        self.files.push(rel.to_string());
        Ok(())
    }

    fn finish(self, seed: u64, invocation: Command, inputs: Vec<PathBuf>) -> Result<(), CliError> {
        let mut files = self.files;
        files.sort();
        RunManifest::new(seed, invocation, digest_inputs(&inputs)?, &self.dir, &files)?.write(&self.dir)
    }
}

struct Loaded {
    file: ScenarioFile,
    inputs: Vec<PathBuf>,
}

/// Scenario file (or defaults) with the shared data flags applied.
fn load_scenario(data: &mut DataArgs) -> Result<Loaded, CliError> {
    let mut inputs = Vec::new();
    let mut file = match &data.config {
        Some(path) => {
            let path = absolute(path)?;
            data.config = Some(path.clone());
            inputs.push(path.clone());
            ScenarioFile::load(&path)?
        }
        None => {
            let scenario = ScenarioConfig::default();
            ScenarioFile {
                grid: GridSpec::single(&scenario),
                scenario,
                data: DataSource::Synthetic { persons: DEFAULT_SYNTHETIC_PERSONS, locations: DEFAULT_SYNTHETIC_LOCATIONS },
            }
        }
    };
    if let Some(seed) = data.seed {
        file.scenario.seed = seed;
    }
    if let Some(r) = data.pttcr_reduction {
        file.scenario.pttcr_reduction = r;
        file.grid.pttcr = vec![r];
    }
    if data.close_schools {
        file.scenario.school_closure = true;
        file.grid.school_closure = vec![true];
    }
    if let Some(persons) = data.synthetic_scale {
        file.data = DataSource::Synthetic { persons, locations: locations_for(persons) };
    }
    if let DataSource::Files { activities, gtfs } = &file.data {
        inputs.push(activities.clone());
        let mut tables: Vec<PathBuf> = fs::read_dir(gtfs)
            .map_err(|e| CliError::new(Class::Data, "MissingFile", format!("{}: {e}", gtfs.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        tables.sort();
        inputs.extend(tables);
    }
    Ok(Loaded { file, inputs })
}

pub fn simulate(mut args: SimulateArgs) -> Result<(), CliError> {
    let Loaded { mut file, inputs } = load_scenario(&mut args.data)?;
    let s = &mut file.scenario;
    if let Some(text) = &args.h_minutes {
        let h = parse_h_minutes(text).ok_or_else(|| CliError::config(format!("--h-minutes {text:?}")))?;
        s.h_threshold_minutes = h;
        file.grid.h_minutes = vec![h];
    }
    if let Some(r0) = args.r0 {
        s.transmission = Transmission::R0(r0);
        file.grid.r0 = vec![r0];
    }
    if let Some(beta) = args.beta {
        s.transmission = Transmission::Beta(beta);
        file.grid.r0 = Vec::new();
    }
    if let Some(days) = args.days {
        s.days = days;
    }
    if let Some(n) = args.replicates {
        s.replicates = n;
    }
    s.validate()?;
    let scenario = file.scenario.clone();

    let (dataset, feed) = load_data(&file.data, scenario.seed)?;
    let runner = ScenarioRunner::new(&dataset, &feed, scenario.clone())?;
    let result = runner.run_grid(&file.grid)?;

    let mut out = Outputs::create(&args.out)?;
    out.write("grid_summary.csv", |w| Ok(report::write_grid_summary(w, &result.cells)?))?;
    out.write("replicates.csv", |w| Ok(report::write_replicates(w, &result.cells)?))?;
    out.write("mean_curves.csv", |w| Ok(report::write_mean_curves(w, &result.cells)?))?;
    if !result.calibrations.is_empty() {
        out.write("calibration.csv", |w| Ok(report::write_calibrations(w, &result.calibrations)?))?;
    }
    for (k, cell) in result.cells.iter().enumerate() {
        out.write(&format!("curves/cell_{k:03}.csv"), |w| {
            Ok(report::write_mean_curves(w, std::slice::from_ref(cell))?)
        })?;
        for rep in &cell.replicates {
            out.write(&format!("series/cell_{k:03}_rep_{:03}.csv", rep.replicate), |w| {
                Ok(report::write_daily_counts(w, &rep.series)?)
            })?;
        }
    }
    if args.dump_contacts {
        for &closure in &file.grid.school_closure {
            for &p in &file.grid.pttcr {
                let graph = runner.graph(p, closure)?;
                out.write(&format!("contacts/pttcr_{p}_closure_{closure}.csv"), |w| {
                    Ok(report::write_contact_dump(w, graph.events())?)
                })?;
            }
        }
    }
    let seed = scenario.seed;
    out.finish(seed, Command::Simulate(args), inputs)
}

fn threshold_graph(args: &mut ThresholdArgs) -> Result<(ContactGraph, u64, Vec<PathBuf>), CliError> {
    if let Some(path) = &args.edges {
        let path = absolute(path)?;
        args.edges = Some(path.clone());
        let file = File::open(&path).map_err(|e| CliError::io(&path, e))?;
        let (events, persons) = report::read_edge_list(file)?;
        let graph = ContactGraph::from_events(persons, events)?;
        return Ok((graph, args.data.seed.unwrap_or(1), vec![path]));
    }
    let Loaded { file, inputs } = load_scenario(&mut args.data)?;
    file.scenario.validate()?;
    let (dataset, feed): (PopulationDataset, TransitFeed) = load_data(&file.data, file.scenario.seed)?;
    let runner = ScenarioRunner::new(&dataset, &feed, file.scenario.clone())?;
    let graph = runner.graph(file.scenario.pttcr_reduction, file.scenario.school_closure)?;
    Ok((graph, file.scenario.seed, inputs))
}

pub fn threshold(mut args: ThresholdArgs) -> Result<(), CliError> {
    if args.alpha.is_empty() || args.transmissibility.is_empty() {
        return Err(CliError::config("--alpha and --t need at least one value"));
    }
    let alphas = args.alpha.iter().map(|&a| InterventionAlpha::new(a)).collect::<Result<Vec<_>, _>>()?;
    let (graph, seed, inputs) = threshold_graph(&mut args)?;
    let decomp = degree_decompose(&graph);
    let mut rows = Vec::new();
    for &a in &alphas {
        for &t in &args.transmissibility {
            let report = threshold_report(&decomp, a, t)?;
            let oracle = match args.oracle_samples {
                0 => None,
                n => Some(percolation_oracle(&decomp, a, t, n, seed)?),
            };
            rows.push(ThresholdRow { report, oracle });
        }
    }
    let mut out = Outputs::create(&args.out)?;
    out.write("threshold.csv", |w| Ok(report::write_threshold_rows(w, &rows)?))?;
    out.finish(seed, Command::Threshold(args), inputs)
}

pub fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let feed = generate_grid_feed(&GridFeedConfig::default());
    let locations = args.locations.unwrap_or_else(|| locations_for(args.synthetic_scale));
    let dataset = generate_synthetic_population(args.synthetic_scale, locations, &feed, args.seed)?;
    let mut out = Outputs::create(&args.out)?;
    out.write("activities.csv", |w| {
        write_activities(&dataset, w).map_err(|e| CliError::new(Class::Runtime, "Io", e.to_string()))
    })?;
    let gtfs = args.out.join("gtfs");
    write_gtfs_feed(&feed, &gtfs).map_err(|e| CliError::io(&gtfs, e))?;
    for table in ["routes.txt", "stop_times.txt", "stops.txt", "trips.txt"] {
        out.files.push(format!("gtfs/{table}"));
    }
    let seed = args.seed;
    out.finish(seed, Command::Generate(args), Vec::new())
}

/// Reruns the recorded command into `out` and compares every output digest.
pub fn replay(args: ReplayArgs) -> Result<(), CliError> {
    let manifest = RunManifest::read(&args.manifest)?;
    for input in &manifest.inputs {
        let digest = sha256_file(Path::new(&input.path))?;
        if digest != input.sha256 {
            return Err(CliError::new(Class::Data, "InputChanged", format!("{} differs from the manifest", input.path)));
        }
    }
    let out = args.out.clone();
    match manifest.invocation.clone() {
        Command::Simulate(mut a) => {
            a.out = out.clone();
            simulate(a)?
        }
        Command::Threshold(mut a) => {
            a.out = out.clone();
            threshold(a)?
        }
        Command::Generate(mut a) => {
            a.out = out.clone();
            generate(a)?
        }
        Command::Replay(_) => return Err(CliError::config("a manifest cannot record a replay")),
    }
    let mismatched: Vec<&str> = manifest
        .outputs
        .iter()
        .filter(|f| sha256_file(&out.join(&f.path)).map_or(true, |d| d != f.sha256))
        .map(|f| f.path.as_str())
        .collect();
    if !mismatched.is_empty() {
        return Err(CliError::new(Class::Runtime, "ReplayMismatch", format!("outputs differ: {}", mismatched.join(", "))));
    }
    Ok(())
}
