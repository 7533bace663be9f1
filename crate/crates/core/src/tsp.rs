//! Euclidean travelling-salesman instances.

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::rng::RngStream;
use crate::space::{is_permutation, Position, SearchSpace};

/// Side length of the square cities are drawn from.
pub const COORD_RANGE: f64 = 100.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TspInstance {
    pub coords: Vec<[f64; 2]>,
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
struct CityRow {
    x: f64,
    y: f64,
}

impl TspInstance {
    pub fn new(coords: Vec<[f64; 2]>, seed: u64) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::InvalidSize { min: 3, got: coords.len() });
        }
        if coords.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Contract("city coordinates must be finite".into()));
        }
        Ok(TspInstance { coords, seed })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let [ax, ay] = self.coords[a];
        let [bx, by] = self.coords[b];
        (ax - bx).hypot(ay - by)
    }

    /// Writes `x,y` rows in city order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "y"]).map_err(csv_err)?;
        for [x, y] in &self.coords {
            w.write_record([x.to_string(), y.to_string()]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads an instance written by [`TspInstance::write_csv`]. Row index is
    /// the city id.
    pub fn read_csv<R: Read>(reader: R, seed: u64) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers().map_err(csv_err)?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x", "y"] {
            return Err(Error::Parse(format!(
                "expected header `x,y`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut coords = Vec::new();
        for (row, rec) in r.deserialize::<CityRow>().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("city row {row}: {e}")))?;
            coords.push([rec.x, rec.y]);
        }
        TspInstance::new(coords, seed)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// `n` cities drawn uniformly from `[0, 100]^2`. The same `(n, seed)` always
/// yields the same instance.
pub fn generate_tsp(n: usize, seed: u64) -> Result<TspInstance> {
    if n < 3 {
        return Err(Error::InvalidSize { min: 3, got: n });
    }
    let mut rng = RngStream::new(seed);
    let coords = (0..n).map(|_| [rng.random_range(0.0..=COORD_RANGE), rng.random_range(0.0..=COORD_RANGE)]).collect();
    TspInstance::new(coords, seed)
}

/// Length of the closed tour `p`.
pub fn tour_length(inst: &TspInstance, p: &[usize]) -> Result<f64> {
    if !is_permutation(p, inst.len()) {
        return Err(Error::Contract(format!("tour is not a permutation of 0..{}", inst.len())));
    }
    Ok(tour_length_unchecked(inst, p))
}

fn tour_length_unchecked(inst: &TspInstance, p: &[usize]) -> f64 {
    let n = p.len();
    (0..n).map(|i| inst.distance(p[i], p[(i + 1) % n])).sum()
}

/// Tour length as an [`Objective`] over the permutation space of the instance.
#[derive(Clone, Debug)]
pub struct TspObjective {
    instance: TspInstance,
    space: SearchSpace,
    name: String,
}

impl TspObjective {
    pub fn new(instance: TspInstance) -> Self {
        let space = SearchSpace::permutation(instance.len()).expect("instances have at least 3 cities");
        let name = format!("tsp{}", instance.len());
        TspObjective { instance, space, name }
    }

    pub fn instance(&self) -> &TspInstance {
        &self.instance
    }
}

impl Objective for TspObjective {
    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, position: &Position) -> f64 {
        let tour = position.as_tour().expect("tsp objective evaluated on a real vector");
        tour_length_unchecked(&self.instance, tour)
    }

    fn name(&self) -> &str {
        &self.name
    }
}
