//! Coupled-sensor entropy objective.
//!
//! Readings come from a CSV with header `location,timestep,temperature,humidity`,
//! one row per (location, timestep) pair. Numeric files are discretized into
//! equal-width bins; categorical files (`low`/`high`, `humid`/`dry`) map
//! straight onto bins. `f(S1, S2)` is the base-2 Shannon entropy of the
//! empirical joint distribution of temperature bins at `S1` and humidity bins
//! at `S2`.

use crate::biset::{mask_elements, Biset, GroundSet};
use crate::error::{Error, Result};
use crate::oracle::{check_ground, FunctionOracle};
use crate::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};
use std::marker::PhantomData;
use std::path::Path;

pub const TABLE1_CSV: &str = include_str!("../fixtures/table1.csv");

const HEADER: [&str; 4] = ["location", "timestep", "temperature", "humidity"];

/// Dense `n × t` grid of raw readings.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadingTable {
    pub location_ids: Vec<u64>,
    pub timestep_ids: Vec<u64>,
    /// `temp[location][timestep]`
    pub temp: Vec<Vec<f64>>,
    pub humid: Vec<Vec<f64>>,
}

impl ReadingTable {
    pub fn locations(&self) -> usize {
        self.location_ids.len()
    }

    pub fn timesteps(&self) -> usize {
        self.timestep_ids.len()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(HEADER).map_err(csv_err)?;
        for (l, &loc) in self.location_ids.iter().enumerate() {
            for (s, &step) in self.timestep_ids.iter().enumerate() {
                w.write_record(&[
                    loc.to_string(),
                    step.to_string(),
                    format!("{:.2}", self.temp[l][s]),
                    format!("{:.2}", self.humid[l][s]),
                ])
                .map_err(csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Binned readings; `temp_bins[location][timestep] < k1`, `humid_bins[..][..] < k2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteReadings {
    pub location_ids: Vec<u64>,
    pub temp_bins: Vec<Vec<u16>>,
    pub humid_bins: Vec<Vec<u16>>,
    pub k1: u16,
    pub k2: u16,
}

impl DiscreteReadings {
    pub fn locations(&self) -> usize {
        self.temp_bins.len()
    }

    pub fn timesteps(&self) -> usize {
        self.temp_bins.first().map_or(0, Vec::len)
    }

    /// Restriction to the given location and timestep indices (0-based, in the given order).
    pub fn subsample(&self, locations: &[usize], timesteps: &[usize]) -> Self {
        let pick = |grid: &Vec<Vec<u16>>| {
            locations
                .iter()
                .map(|&l| timesteps.iter().map(|&s| grid[l][s]).collect())
                .collect()
        };
        Self {
            location_ids: locations.iter().map(|&l| self.location_ids[l]).collect(),
            temp_bins: pick(&self.temp_bins),
            humid_bins: pick(&self.humid_bins),
            k1: self.k1,
            k2: self.k2,
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse { line, msg: e.to_string() }
}

struct Grid<V> {
    location_ids: Vec<u64>,
    timestep_ids: Vec<u64>,
    first: Vec<Vec<V>>,
    second: Vec<Vec<V>>,
}

fn parse_grid<R, V, F>(reader: R, mut parse: F) -> Result<Grid<V>>
where
    R: Read,
    V: Copy,
    F: FnMut(&str, usize) -> std::result::Result<V, String>,
{
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Parse { line: 1, msg: "empty file: missing header".into() });
    }
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header `{}`, found `{}`", HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut cells: HashMap<(u64, u64), (V, V)> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let perr = |msg: String| Error::Parse { line, msg };
        let id = |col: usize| -> Result<u64> {
            match record[col].parse::<u64>() {
                Ok(v) if v > 0 => Ok(v),
                _ => Err(perr(format!("{} must be a positive integer, found `{}`", HEADER[col], &record[col]))),
            }
        };
        let (location, timestep) = (id(0)?, id(1)?);
        let a = parse(&record[2], 2).map_err(perr)?;
        let b = parse(&record[3], 3).map_err(perr)?;
        if cells.insert((location, timestep), (a, b)).is_some() {
            return Err(Error::DuplicateKey { location, timestep });
        }
    }
    if cells.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no data rows".into() });
    }

    let location_ids: Vec<u64> = cells.keys().map(|k| k.0).collect::<BTreeSet<_>>().into_iter().collect();
    let timestep_ids: Vec<u64> = cells.keys().map(|k| k.1).collect::<BTreeSet<_>>().into_iter().collect();
    let mut first = Vec::with_capacity(location_ids.len());
    let mut second = Vec::with_capacity(location_ids.len());
    for &location in &location_ids {
        let mut row_a = Vec::with_capacity(timestep_ids.len());
        let mut row_b = Vec::with_capacity(timestep_ids.len());
        for &timestep in &timestep_ids {
            let &(a, b) = cells.get(&(location, timestep)).ok_or(Error::IncompleteGrid { location, timestep })?;
            row_a.push(a);
            row_b.push(b);
        }
        first.push(row_a);
        second.push(row_b);
    }
    Ok(Grid { location_ids, timestep_ids, first, second })
}

/// Reads a numeric readings CSV.
pub fn ingest_reader<R: Read>(reader: R) -> Result<ReadingTable> {
    let grid = parse_grid(reader, |s, col| match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("{} must be a finite decimal, found `{s}`", HEADER[col])),
    })?;
    Ok(ReadingTable {
        location_ids: grid.location_ids,
        timestep_ids: grid.timestep_ids,
        temp: grid.first,
        humid: grid.second,
    })
}

pub fn ingest(path: impl AsRef<Path>) -> Result<ReadingTable> {
    ingest_reader(std::fs::File::open(path)?)
}

/// Reads a categorical readings CSV: `low→0, high→1`, `humid→0, dry→1`.
pub fn ingest_categorical_reader<R: Read>(reader: R) -> Result<DiscreteReadings> {
    let grid = parse_grid(reader, |s, col| match (col, s.to_ascii_lowercase().as_str()) {
        (2, "low") | (3, "humid") => Ok(0u16),
        (2, "high") | (3, "dry") => Ok(1u16),
        (2, _) => Err(format!("temperature must be `low` or `high`, found `{s}`")),
        _ => Err(format!("humidity must be `humid` or `dry`, found `{s}`")),
    })?;
    Ok(DiscreteReadings {
        location_ids: grid.location_ids,
        temp_bins: grid.first,
        humid_bins: grid.second,
        k1: 2,
        k2: 2,
    })
}

pub fn ingest_categorical(path: impl AsRef<Path>) -> Result<DiscreteReadings> {
    ingest_categorical_reader(std::fs::File::open(path)?)
}

/// The bundled Example-1 data (3 locations × 7 days).
pub fn table1() -> DiscreteReadings {
    ingest_categorical_reader(TABLE1_CSV.as_bytes()).expect("bundled fixture parses")
}

/// Loads either file flavour, discretizing numeric readings with `(k1, k2)` bins.
pub fn load_readings(path: impl AsRef<Path>, k1: u16, k2: u16) -> Result<DiscreteReadings> {
    let text = std::fs::read_to_string(path)?;
    load_readings_str(&text, k1, k2)
}

pub fn load_readings_str(text: &str, k1: u16, k2: u16) -> Result<DiscreteReadings> {
    let categorical = text
        .lines()
        .nth(1)
        .and_then(|l| l.split(',').nth(2))
        .is_some_and(|v| v.trim().parse::<f64>().is_err());
    if categorical {
        ingest_categorical_reader(text.as_bytes())
    } else {
        Ok(discretize(&ingest_reader(text.as_bytes())?, k1, k2))
    }
}

/// Equal-width bin of `v` over `[min, max]`; the maximum clamps into the top
/// bin and a degenerate range maps everything to bin 0.
pub fn bin_of(v: f64, min: f64, max: f64, k: u16) -> u16 {
    if k <= 1 || max <= min {
        return 0;
    }
    let width = (max - min) / f64::from(k);
    let b = ((v - min) / width).floor();
    if b <= 0.0 {
        0
    } else {
        (b as u64).min(u64::from(k) - 1) as u16
    }
}

fn bin_grid(grid: &[Vec<f64>], k: u16) -> Vec<Vec<u16>> {
    let (min, max) = grid
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    grid.iter().map(|row| row.iter().map(|&v| bin_of(v, min, max, k)).collect()).collect()
}

/// Global equal-width binning per measurement type.
pub fn discretize(rt: &ReadingTable, k1: u16, k2: u16) -> DiscreteReadings {
    let k1 = k1.max(1);
    let k2 = k2.max(1);
    DiscreteReadings {
        location_ids: rt.location_ids.clone(),
        temp_bins: bin_grid(&rt.temp, k1),
        humid_bins: bin_grid(&rt.humid, k2),
        k1,
        k2,
    }
}

/// `f(S1, S2) = H(X_{S1,S2})` in bits.
#[derive(Debug, Clone)]
pub struct EntropyOracle<T> {
    ground: GroundSet,
    readings: DiscreteReadings,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> EntropyOracle<T> {
    pub fn new(readings: DiscreteReadings) -> Result<Self> {
        let ground = GroundSet::new(readings.locations())?;
        if readings.timesteps() == 0 {
            return Err(Error::InsufficientData("readings contain no timesteps".into()));
        }
        Ok(Self { ground, readings, _scalar: PhantomData })
    }

    pub fn readings(&self) -> &DiscreteReadings {
        &self.readings
    }

    pub fn entropy(&self, b: &Biset) -> Result<T> {
        check_ground(self.ground, b)?;
        let t = self.readings.timesteps();
        let elems: Vec<(usize, bool)> = mask_elements(b.s1_mask() | b.s2_mask())
            .map(|i| (i, b.s1_mask() >> i & 1 == 1))
            .collect();
        let k1 = self.readings.k1;
        let mut counts: HashMap<Vec<u16>, usize> = HashMap::new();
        for step in 0..t {
            let key = elems
                .iter()
                .map(|&(i, temp)| {
                    if temp {
                        self.readings.temp_bins[i][step]
                    } else {
                        k1 + self.readings.humid_bins[i][step]
                    }
                })
                .collect();
            *counts.entry(key).or_default() += 1;
        }
        let mut counts: Vec<usize> = counts.into_values().collect();
        counts.sort_unstable();
        let total = T::lit(t as f64);
        Ok(counts
            .into_iter()
            .map(|c| {
                let p = T::lit(c as f64) / total;
                -p * p.log2()
            })
            .sum())
    }
}

impl<T: Scalar> FunctionOracle<T> for EntropyOracle<T> {
    fn ground(&self) -> GroundSet {
        self.ground
    }

    fn evaluate(&mut self, b: &Biset) -> Result<T> {
        self.entropy(b)
    }
}

/// Synthetic lab-style readings: a daily temperature cycle with per-location
/// offsets and zone-level drift, humidity anti-correlated with temperature.
pub fn synthetic_readings(locations: usize, timesteps: usize, seed: u64) -> ReadingTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zones = 6;
    let zone: Vec<usize> = (0..locations).map(|_| rng.gen_range(0..zones)).collect();
    let offset: Vec<f64> = (0..locations).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let phase: Vec<f64> = (0..locations).map(|_| rng.gen_range(-0.6..0.6)).collect();
    let mut drift = vec![0.0f64; zones];
    let mut temp = vec![Vec::with_capacity(timesteps); locations];
    let mut humid = vec![Vec::with_capacity(timesteps); locations];
    for step in 0..timesteps {
        for d in drift.iter_mut() {
            *d = 0.9 * *d + rng.gen_range(-1.0..1.0);
        }
        let hour = step as f64 * 2.0 * std::f64::consts::PI / 24.0;
        for l in 0..locations {
            let noise: f64 = rng.gen_range(-1.0..1.0) + rng.gen_range(-1.0..1.0);
            let tv = 21.0 + offset[l] + 4.0 * (hour + phase[l]).sin() + drift[zone[l]] + noise;
            let hv = 38.0 - 1.6 * (tv - 21.0) + 2.0 * drift[(zone[l] + 1) % zones] + 3.0 * rng.gen_range(-1.0..1.0);
            temp[l].push((tv * 100.0).round() / 100.0);
            humid[l].push((hv * 100.0).round() / 100.0);
        }
    }
    ReadingTable {
        location_ids: (1..=locations as u64).collect(),
        timestep_ids: (1..=timesteps as u64).collect(),
        temp,
        humid,
    }
}
