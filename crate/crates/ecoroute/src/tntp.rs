//! Reader and writer for the TNTP network and trips text formats.
//!
//! A network file starts with `<TAG> value` metadata lines closed by
//! `<END OF METADATA>`, followed by one link per line:
//!
//! ```text
//! ~ tail head capacity length free_flow_time b power speed toll link_type ;
//!   1    2    25900.2  6      6              0.15 4   0     0    1         ;
//! ```
//!
//! A trips file has the same metadata block, then `Origin r` headers each
//! followed by `s : flow;` pairs. `~` starts a comment anywhere on a line.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use ecoroute_core::{DemandTable, Link, LinkAttrs, LinkId, Network, NodeId, VehicleClass};
use log::warn;

use crate::error::TntpError;

/// Free-flow time, in minutes, given to records whose time is zero.
pub const MIN_FREE_FLOW_TIME: f64 = 0.01;

/// Scale factors from a file's native units to miles and minutes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitsConfig {
    pub length_to_miles: f64,
    pub time_to_minutes: f64,
    pub ignore_toll: bool,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        UnitsConfig {
            length_to_miles: 1.0,
            time_to_minutes: 1.0,
            ignore_toll: true,
        }
    }
}

impl UnitsConfig {
    /// Parses `key=value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, TntpError> {
        let mut units = UnitsConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| TntpError::Units { line: i + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let positive = |v: &str| match v.parse::<f64>() {
                Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
                _ => Err(bad(format!("{key} must be a positive number, got {v:?}"))),
            };
            match key {
                "length_to_miles" => units.length_to_miles = positive(value)?,
                "time_to_minutes" => units.time_to_minutes = positive(value)?,
                "ignore_toll" => {
                    units.ignore_toll = value.parse().map_err(|_| {
                        bad(format!("ignore_toll must be true or false, got {value:?}"))
                    })?
                }
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        Ok(units)
    }
}

/// Metadata counts declared in a network file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkHeader {
    pub zones: u32,
    pub nodes: u32,
    pub links: usize,
    pub first_through_node: u32,
}

#[derive(Debug, Clone)]
pub struct ParsedNetwork {
    pub network: Network,
    pub header: NetworkHeader,
    /// Links whose zero free-flow time was replaced.
    pub zero_time_links: Vec<LinkId>,
}

#[derive(Debug, Clone)]
pub struct ParsedTrips {
    /// Single-class (time-routing) demand, intrazonal entries dropped.
    pub demand: DemandTable,
    pub zones: u32,
    pub declared_total: Option<f64>,
    /// Sum of every pair read, intrazonal included.
    pub parsed_total: f64,
    pub intrazonal_dropped: usize,
}

/// Splits off the metadata block. Returns `(tag, value)` pairs and the
/// 1-based line number where the body starts.
fn read_metadata(text: &str) -> Result<(Vec<(String, String)>, usize), TntpError> {
    let mut tags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let Some(rest) = line.strip_prefix('<') else {
            if line.is_empty() || line.starts_with('~') {
                continue;
            }
            return Err(TntpError::Malformed {
                line: i + 1,
                msg: format!("expected a metadata tag, got {line:?}"),
            });
        };
        let (tag, value) = rest.split_once('>').ok_or_else(|| TntpError::Malformed {
            line: i + 1,
            msg: "unterminated metadata tag".into(),
        })?;
        let tag = tag.trim().to_ascii_uppercase();
        if tag == "END OF METADATA" {
            return Ok((tags, i + 2));
        }
        tags.push((tag, value.trim().to_string()));
    }
    Err(TntpError::MissingTag("END OF METADATA"))
}

fn tag_value<T: FromStr>(
    tags: &[(String, String)],
    name: &'static str,
) -> Result<Option<T>, TntpError> {
    match tags.iter().find(|(t, _)| t == name) {
        None => Ok(None),
        Some((_, v)) => {
            // values may carry a trailing comment
            let v = v.split('~').next().unwrap_or("").trim();
            v.parse().map(Some).map_err(|_| TntpError::BadTag {
                tag: name,
                value: v.to_string(),
            })
        }
    }
}

fn required<T: FromStr>(tags: &[(String, String)], name: &'static str) -> Result<T, TntpError> {
    tag_value(tags, name)?.ok_or(TntpError::MissingTag(name))
}

fn strip_comment(line: &str) -> &str {
    line.split('~').next().unwrap_or("").trim()
}

fn number<T: FromStr>(tok: &str, what: &str, line: usize) -> Result<T, TntpError> {
    tok.parse().map_err(|_| TntpError::Malformed {
        line,
        msg: format!("bad {what} {tok:?}"),
    })
}

/// Parses a `*_net.tntp` file into a network, scaling lengths to miles and
/// times to minutes. Nodes are `1..=nodes`, zones `1..=zones`.
pub fn parse_network(text: &str, units: &UnitsConfig) -> Result<ParsedNetwork, TntpError> {
    let (tags, body_start) = read_metadata(text)?;
    let header = NetworkHeader {
        zones: required(&tags, "NUMBER OF ZONES")?,
        nodes: required(&tags, "NUMBER OF NODES")?,
        links: required(&tags, "NUMBER OF LINKS")?,
        first_through_node: tag_value(&tags, "FIRST THRU NODE")?.unwrap_or(1),
    };

    let mut links = Vec::with_capacity(header.links);
    let mut zero_time_links = Vec::new();
    for (i, raw) in text.lines().enumerate().skip(body_start - 1) {
        let line_no = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let record = line.split(';').next().unwrap_or("");
        let fields: Vec<&str> = record.split_whitespace().collect();
        if fields.len() != 10 {
            return Err(TntpError::Malformed {
                line: line_no,
                msg: format!("expected 10 link fields, found {}", fields.len()),
            });
        }
        let id = LinkId(links.len() as u32 + 1);
        let tail = NodeId(number(fields[0], "tail node", line_no)?);
        let head = NodeId(number(fields[1], "head node", line_no)?);
        let capacity: f64 = number(fields[2], "capacity", line_no)?;
        let length = number::<f64>(fields[3], "length", line_no)? * units.length_to_miles;
        let mut free_flow_time =
            number::<f64>(fields[4], "free-flow time", line_no)? * units.time_to_minutes;
        if free_flow_time == 0.0 {
            free_flow_time = MIN_FREE_FLOW_TIME;
            zero_time_links.push(id);
        }
        let link_type = fields[9]
            .parse::<i64>()
            .or_else(|_| fields[9].parse::<f64>().map(|v| v as i64))
            .map_err(|_| TntpError::Malformed {
                line: line_no,
                msg: format!("bad link type {:?}", fields[9]),
            })?;
        links.push(Link {
            id,
            tail,
            head,
            capacity,
            length,
            free_flow_time,
            alpha: number(fields[5], "b", line_no)?,
            beta: number(fields[6], "power", line_no)?,
            attrs: LinkAttrs {
                speed_limit: number(fields[7], "speed", line_no)?,
                toll: number(fields[8], "toll", line_no)?,
                link_type,
            },
        });
    }
    if links.len() != header.links {
        return Err(TntpError::CountMismatch {
            what: "links",
            declared: header.links,
            found: links.len(),
        });
    }
    if !zero_time_links.is_empty() {
        warn!(
            "{} links had zero free-flow time; set to {MIN_FREE_FLOW_TIME} min",
            zero_time_links.len()
        );
    }

    let network = Network::new(
        (1..=header.nodes).map(NodeId).collect(),
        links,
        (1..=header.zones).map(NodeId).collect(),
        NodeId(header.first_through_node),
    );
    Ok(ParsedNetwork {
        network,
        header,
        zero_time_links,
    })
}

/// Parses a `*_trips.tntp` file into time-routing demand.
pub fn parse_trips(text: &str) -> Result<ParsedTrips, TntpError> {
    let (tags, body_start) = read_metadata(text)?;
    let zones: u32 = required(&tags, "NUMBER OF ZONES")?;
    let declared_total: Option<f64> = tag_value(&tags, "TOTAL OD FLOW")?;

    let mut demand = DemandTable::new();
    let mut origin: Option<NodeId> = None;
    let mut parsed_total = 0.0;
    let mut intrazonal_dropped = 0;
    for (i, raw) in text.lines().enumerate().skip(body_start - 1) {
        let line_no = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("Origin") {
            origin = Some(NodeId(number(rest.trim(), "origin", line_no)?));
            continue;
        }
        let o = origin.ok_or_else(|| TntpError::Malformed {
            line: line_no,
            msg: "destination pairs before any Origin header".into(),
        })?;
        for pair in line.split(';') {
            let pair = pair.trim();
            if pair.is_empty() {
                continue;
            }
            let (dest, rate) = pair.split_once(':').ok_or_else(|| TntpError::Malformed {
                line: line_no,
                msg: format!("expected `destination : flow`, got {pair:?}"),
            })?;
            let dest = NodeId(number(dest.trim(), "destination", line_no)?);
            let rate: f64 = number(rate.trim(), "flow", line_no)?;
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(TntpError::Malformed {
                    line: line_no,
                    msg: format!("negative or non-finite flow {rate}"),
                });
            }
            parsed_total += rate;
            if rate == 0.0 {
                continue;
            }
            let kept = demand
                .add(o, dest, VehicleClass::TimeRouting, rate)
                .map_err(|e| TntpError::Malformed {
                    line: line_no,
                    msg: e.to_string(),
                })?;
            if !kept {
                intrazonal_dropped += 1;
            }
        }
    }
    if intrazonal_dropped > 0 {
        warn!("dropped {intrazonal_dropped} intrazonal demand entries");
    }
    if let Some(total) = declared_total {
        if (parsed_total - total).abs() > 1e-4 * total.abs().max(1.0) {
            warn!("trips total {parsed_total} differs from declared <TOTAL OD FLOW> {total}");
        }
    }
    Ok(ParsedTrips {
        demand,
        zones,
        declared_total,
        parsed_total,
        intrazonal_dropped,
    })
}

/// A network file and its trips file must describe the same zones.
pub fn check_zone_counts(net: &ParsedNetwork, trips: &ParsedTrips) -> Result<(), TntpError> {
    if net.header.zones != trips.zones {
        return Err(TntpError::ZoneCountMismatch {
            network: net.header.zones,
            trips: trips.zones,
        });
    }
    Ok(())
}

/// Writes a network back out in TNTP form, in the file units described by
/// `units`. With identity units the output reparses to an identical network.
pub fn write_network(net: &Network, units: &UnitsConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "<NUMBER OF ZONES> {}", net.zones().len());
    let _ = writeln!(out, "<NUMBER OF NODES> {}", net.node_count());
    let _ = writeln!(out, "<FIRST THRU NODE> {}", net.first_through_node().0);
    let _ = writeln!(out, "<NUMBER OF LINKS> {}", net.link_count());
    out.push_str("<END OF METADATA>\n\n\n");
    out.push_str(
        "~\ttail\thead\tcapacity\tlength\tfree_flow_time\tb\tpower\tspeed\ttoll\tlink_type\t;\n",
    );
    for l in net.links() {
        let _ = writeln!(
            out,
            "\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t;",
            l.tail.0,
            l.head.0,
            l.capacity,
            l.length / units.length_to_miles,
            l.free_flow_time / units.time_to_minutes,
            l.alpha,
            l.beta,
            l.attrs.speed_limit,
            l.attrs.toll,
            l.attrs.link_type,
        );
    }
    out
}

/// Writes the time-routing part of a demand table as a trips file.
pub fn write_trips(demand: &DemandTable, zones: u32) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "<NUMBER OF ZONES> {zones}");
    let _ = writeln!(
        out,
        "<TOTAL OD FLOW> {}",
        demand.total(VehicleClass::TimeRouting)
    );
    out.push_str("<END OF METADATA>\n\n");
    let mut current = None;
    for (o, d, c, rate) in demand.iter() {
        if c != VehicleClass::TimeRouting {
            continue;
        }
        if current != Some(o) {
            let _ = write!(out, "\nOrigin {}\n", o.0);
            current = Some(o);
        }
        let _ = writeln!(out, "    {} : {};", d.0, rate);
    }
    out
}

/// A network and trips pair read from disk.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub net: ParsedNetwork,
    pub trips: ParsedTrips,
    pub units: UnitsConfig,
}

fn read_text(path: &Path) -> crate::Result<String> {
    std::fs::read_to_string(path).map_err(|source| crate::Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn in_file(path: &Path) -> impl FnOnce(TntpError) -> crate::Error + '_ {
    move |source| crate::Error::TntpFile {
        path: path.display().to_string(),
        source,
    }
}

/// Reads and cross-checks a network file, a trips file and an optional
/// units file. Parse errors name the offending file.
pub fn load_dataset(net: &Path, trips: &Path, units: Option<&Path>) -> crate::Result<Dataset> {
    let units = match units {
        Some(p) => UnitsConfig::parse(&read_text(p)?).map_err(in_file(p))?,
        None => UnitsConfig::default(),
    };
    let parsed_net = parse_network(&read_text(net)?, &units).map_err(in_file(net))?;
    let parsed_trips = parse_trips(&read_text(trips)?).map_err(in_file(trips))?;
    check_zone_counts(&parsed_net, &parsed_trips)?;
    Ok(Dataset {
        net: parsed_net,
        trips: parsed_trips,
        units,
    })
}
