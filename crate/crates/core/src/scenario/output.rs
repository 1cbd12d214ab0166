//! CSV outputs of a run.

use crate::error::{Error, Result};
use crate::sim::{StepStats, TripRecord};

pub const TRIPINFO_HEADER: &str = "vehicle_id,depart,arrival,duration,waiting_steps,route_length,edges_count";
pub const METRICS_HEADER: &str = "step,in_network,arrived,avg_travel_time";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("writing to memory");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

/// One row per trip, ordered by vehicle id; unfinished trips leave
/// `arrival` and `duration` empty.
pub fn write_tripinfo(records: &[TripRecord]) -> String {
    let mut sorted: Vec<&TripRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.vehicle_id.cmp(&b.vehicle_id));
    let mut w = writer();
    w.write_record(TRIPINFO_HEADER.split(',')).expect("writing to memory");
    for r in sorted {
        w.write_record([
            r.vehicle_id.clone(),
            r.depart.to_string(),
            opt(r.arrival),
            opt(r.duration),
            r.waiting_steps.to_string(),
            r.route_length.to_string(),
            r.edges_count.to_string(),
        ])
        .expect("writing to memory");
    }
    finish(w)
}

/// Reads back what [`write_tripinfo`] wrote.
pub fn parse_tripinfo(text: &str) -> Result<Vec<TripRecord>> {
    let mut rd = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let bad = |e: &dyn std::fmt::Display| Error::Scenario(format!("tripinfo: {e}"));
    let header = rd.headers().map_err(|e| bad(&e))?.iter().collect::<Vec<_>>().join(",");
    if header != TRIPINFO_HEADER {
        return Err(bad(&format!("unexpected header `{header}`")));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| bad(&e))?;
        let int = |i: usize| row[i].parse::<u64>().map_err(|e| bad(&e));
        let opt_int = |i: usize| match &row[i] {
            "" => Ok(None),
            s => s.parse::<u64>().map(Some).map_err(|e| bad(&e)),
        };
        out.push(TripRecord {
            vehicle_id: row[0].to_string(),
            depart: int(1)?,
            arrival: opt_int(2)?,
            duration: opt_int(3)?,
            waiting_steps: int(4)?,
            route_length: row[5].parse::<f64>().map_err(|e| bad(&e))?,
            edges_count: int(6)? as usize,
        });
    }
    Ok(out)
}

/// Per-step rows followed by a `summary` row holding the mean of the
/// running average travel time (empty when nothing arrived).
pub fn write_metrics(series: &[StepStats], summary: Option<f64>) -> String {
    let mut w = writer();
    w.write_record(METRICS_HEADER.split(',')).expect("writing to memory");
    for s in series {
        w.write_record([
            s.step.to_string(),
            s.in_network.to_string(),
            s.arrived.to_string(),
            opt(s.avg_travel_time),
        ])
        .expect("writing to memory");
    }
    w.write_record(["summary", "", "", &opt(summary)])
        .expect("writing to memory");
    finish(w)
}
