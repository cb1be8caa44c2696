use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::SimError;

/// Half-open cycle interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub start: u64,
    pub end: u64,
}

impl Interval {
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

/// Active intervals per instance, sorted and disjoint, within `[0, t_sim_cycles)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityTrace {
    /// Instance ids in declaration order with their intervals.
    pub instances: Vec<(String, Vec<Interval>)>,
    pub t_sim_cycles: u64,
}

impl ActivityTrace {
    pub fn intervals(&self, instance_id: &str) -> Option<&[Interval]> {
        self.instances
            .iter()
            .find(|(id, _)| id == instance_id)
            .map(|(_, v)| v.as_slice())
    }

    pub fn active_cycles(&self, instance_id: &str) -> Option<u64> {
        self.intervals(instance_id)
            .map(|v| v.iter().map(Interval::len).sum())
    }

    /// Checks ordering, disjointness and bounds.
    pub fn validate(&self) -> Result<(), SimError> {
        for (id, intervals) in &self.instances {
            let mut last_end = 0;
            for (k, iv) in intervals.iter().enumerate() {
                if iv.is_empty() || iv.end > self.t_sim_cycles || (k > 0 && iv.start < last_end) {
                    return Err(SimError::InvalidTrace(format!(
                        "instance `{id}`: interval [{}, {}) breaks ordering or bounds (t_sim = {})",
                        iv.start, iv.end, self.t_sim_cycles
                    )));
                }
                last_end = iv.end;
            }
        }
        Ok(())
    }

    /// Writes `instance_id,t_start_cycles,t_end_cycles` rows followed by one
    /// summary row per instance whose `t_start_cycles` column reads `alpha`
    /// and whose last column holds the coefficient.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SimError> {
        let alphas = activity_coefficients(self)?;
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| SimError::Io(e.to_string());
        w.write_record(["instance_id", "t_start_cycles", "t_end_cycles"]).map_err(io)?;
        for (id, intervals) in &self.instances {
            for iv in intervals {
                w.write_record([id.as_str(), &iv.start.to_string(), &iv.end.to_string()])
                    .map_err(io)?;
            }
        }
        for (id, _) in &self.instances {
            w.write_record([id.as_str(), "alpha", &format!("{:.12}", alphas[id])])
                .map_err(io)?;
        }
        w.flush().map_err(|e| SimError::Io(e.to_string()))
    }
}

/// Fraction of simulated time each instance spent active.
pub fn activity_coefficients(trace: &ActivityTrace) -> Result<BTreeMap<String, f64>, SimError> {
    if trace.t_sim_cycles == 0 {
        return Err(SimError::ZeroDuration);
    }
    trace.validate()?;
    Ok(trace
        .instances
        .iter()
        .map(|(id, intervals)| {
            let active: u64 = intervals.iter().map(Interval::len).sum();
            (id.clone(), active as f64 / trace.t_sim_cycles as f64)
        })
        .collect())
}

/// Appends `[start, end)` to a sorted interval list, merging with the last
/// interval when they touch or overlap. Starts must be non-decreasing.
pub(crate) fn push_merged(list: &mut Vec<Interval>, start: u64, end: u64) {
    if end <= start {
        return;
    }
    if let Some(last) = list.last_mut() {
        debug_assert!(start >= last.start);
        if start <= last.end {
            last.end = last.end.max(end);
            return;
        }
    }
    list.push(Interval { start, end });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(intervals: &[(u64, u64)], t_sim: u64) -> ActivityTrace {
        ActivityTrace {
            instances: vec![(
                "ip".into(),
                intervals.iter().map(|&(start, end)| Interval { start, end }).collect(),
            )],
            t_sim_cycles: t_sim,
        }
    }

    #[test]
    fn always_active() {
        let a = activity_coefficients(&trace(&[(0, 100)], 100)).unwrap();
        assert_eq!(a["ip"], 1.0);
    }

    #[test]
    fn never_active() {
        let a = activity_coefficients(&trace(&[], 1000)).unwrap();
        assert_eq!(a["ip"], 0.0);
    }

    #[test]
    fn two_intervals() {
        let t = trace(&[(0, 10), (50, 60)], 200);
        let a = activity_coefficients(&t).unwrap();
        // Per-cycle count of the same intervals.
        let counted = (0..200u64).filter(|c| *c < 10 || (50..60).contains(c)).count();
        assert_eq!(counted, 20);
        assert!((a["ip"] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn zero_duration_is_an_error() {
        assert!(matches!(
            activity_coefficients(&trace(&[], 0)),
            Err(SimError::ZeroDuration)
        ));
    }

    #[test]
    fn invalid_traces_rejected() {
        assert!(activity_coefficients(&trace(&[(0, 10), (5, 20)], 100)).is_err());
        assert!(activity_coefficients(&trace(&[(90, 110)], 100)).is_err());
    }

    #[test]
    fn merge_rules() {
        let mut v = Vec::new();
        push_merged(&mut v, 0, 10);
        push_merged(&mut v, 10, 20);
        push_merged(&mut v, 15, 18);
        push_merged(&mut v, 30, 30);
        push_merged(&mut v, 40, 41);
        assert_eq!(v, vec![Interval { start: 0, end: 20 }, Interval { start: 40, end: 41 }]);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        trace(&[(0, 10), (50, 60)], 200).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "instance_id,t_start_cycles,t_end_cycles\nip,0,10\nip,50,60\nip,alpha,0.100000000000\n"
        );
    }
}
