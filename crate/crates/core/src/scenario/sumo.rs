//! SUMO net/route subset: junctions, edges with lanes and connections;
//! vehicles, trips and named routes. Anything else is counted and skipped.

use std::collections::{HashMap, HashSet};

use roxmltree::{Document, Node as XmlNode};

use super::DemandSpec;
use crate::error::{Error, Result};
use crate::network::{DriverProfile, EdgeSpec, Node, RoadNetwork};

/// An import result with the number of elements that were skipped.
#[derive(Debug, Clone)]
pub struct Imported<T> {
    pub value: T,
    pub ignored: usize,
}

fn xml_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Xml {
        path: path.into(),
        message: message.into(),
    }
}

fn parse_doc(text: &str) -> Result<Document<'_>> {
    Document::parse(text).map_err(|e| {
        let pos = e.pos();
        Error::Syntax {
            line: pos.row as usize,
            column: pos.col as usize,
            message: e.to_string(),
        }
    })
}

fn element_path(node: XmlNode) -> String {
    let mut parts: Vec<String> = node
        .ancestors()
        .filter(|n| n.is_element())
        .map(|n| match n.attribute("id") {
            Some(id) => format!("{}[@id='{id}']", n.tag_name().name()),
            None => n.tag_name().name().to_string(),
        })
        .collect();
    parts.reverse();
    format!("/{}", parts.join("/"))
}

fn attr<'a>(node: XmlNode<'a, '_>, name: &str) -> Result<&'a str> {
    node.attribute(name)
        .ok_or_else(|| xml_err(element_path(node), format!("missing attribute `{name}`")))
}

fn num_attr(node: XmlNode, name: &str) -> Result<f64> {
    let raw = attr(node, name)?;
    raw.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
        xml_err(
            element_path(node),
            format!("attribute `{name}` is not a number: `{raw}`"),
        )
    })
}

fn check_root(doc: &Document, tag: &str) -> Result<()> {
    let root = doc.root_element();
    if root.tag_name().name() != tag {
        return Err(xml_err(element_path(root), format!("expected a <{tag}> root element")));
    }
    Ok(())
}

fn is_internal(id: &str) -> bool {
    id.starts_with(':')
}

/// Builds a network from a `.net.xml` document. Edge length and speed come
/// from the first lane; the lane count is the number of lanes.
pub fn import_sumo_net(text: &str) -> Result<Imported<RoadNetwork>> {
    let doc = parse_doc(text)?;
    check_root(&doc, "net")?;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut connections = Vec::new();
    let mut seen_conn = HashSet::new();
    let mut ignored = 0;
    for el in doc.root_element().children().filter(|n| n.is_element()) {
        match el.tag_name().name() {
            "junction" => {
                let id = attr(el, "id")?;
                if is_internal(id) || el.attribute("type") == Some("internal") {
                    ignored += 1;
                    continue;
                }
                nodes.push(Node {
                    id: id.to_string(),
                    x: num_attr(el, "x")?,
                    y: num_attr(el, "y")?,
                });
            }
            "edge" => {
                let id = attr(el, "id")?;
                if is_internal(id) || el.attribute("function") == Some("internal") {
                    ignored += 1;
                    continue;
                }
                let lanes: Vec<XmlNode> = el
                    .children()
                    .filter(|c| c.is_element() && c.tag_name().name() == "lane")
                    .collect();
                let first = *lanes
                    .first()
                    .ok_or_else(|| xml_err(element_path(el), "edge has no <lane> children"))?;
                edges.push(EdgeSpec {
                    id: id.to_string(),
                    from: attr(el, "from")?.to_string(),
                    to: attr(el, "to")?.to_string(),
                    length: num_attr(first, "length")?,
                    speed: num_attr(first, "speed")?,
                    lanes: lanes.len() as u32,
                });
            }
            "connection" => {
                let from = attr(el, "from")?;
                let to = attr(el, "to")?;
                if is_internal(from) || is_internal(to) {
                    ignored += 1;
                    continue;
                }
                if seen_conn.insert((from, to)) {
                    connections.push((from.to_string(), to.to_string()));
                }
            }
            _ => ignored += 1,
        }
    }
    let conns = (!connections.is_empty()).then_some(connections.as_slice());
    let value = RoadNetwork::new(nodes, edges, conns)?;
    Ok(Imported { value, ignored })
}

fn route_edges(node: XmlNode) -> Result<Vec<String>> {
    let edges: Vec<String> = attr(node, "edges")?.split_whitespace().map(str::to_string).collect();
    if edges.is_empty() {
        return Err(xml_err(element_path(node), "route has no edges"));
    }
    Ok(edges)
}

/// Reads a `.rou.xml` document. Each vehicle or trip becomes one demand from
/// the first to the last edge of its route; departures round to whole seconds.
pub fn import_sumo_routes(text: &str) -> Result<Imported<Vec<DemandSpec>>> {
    let doc = parse_doc(text)?;
    check_root(&doc, "routes")?;
    let top: Vec<XmlNode> = doc.root_element().children().filter(|n| n.is_element()).collect();
    let mut named: HashMap<&str, Vec<String>> = HashMap::new();
    for el in top.iter().filter(|n| n.tag_name().name() == "route") {
        named.insert(attr(*el, "id")?, route_edges(*el)?);
    }
    let mut ignored = 0;
    let mut ids = HashSet::new();
    let mut out = Vec::new();
    for el in top {
        match el.tag_name().name() {
            "vehicle" | "trip" => {}
            "route" => continue,
            _ => {
                ignored += 1;
                continue;
            }
        }
        let id = attr(el, "id")?;
        if !ids.insert(id) {
            return Err(Error::Scenario(format!("duplicate vehicle id `{id}`")));
        }
        let depart = num_attr(el, "depart")?;
        if depart < 0.0 {
            return Err(xml_err(element_path(el), "negative departure time"));
        }
        let nested = el.children().find(|c| c.is_element() && c.tag_name().name() == "route");
        let (origin, dest) = if let Some(r) = nested {
            let e = route_edges(r)?;
            (e[0].clone(), e[e.len() - 1].clone())
        } else if let Some(name) = el.attribute("route") {
            let e = named
                .get(name)
                .ok_or_else(|| Error::Scenario(format!("vehicle `{id}` references unknown route `{name}`")))?;
            (e[0].clone(), e[e.len() - 1].clone())
        } else {
            (attr(el, "from")?.to_string(), attr(el, "to")?.to_string())
        };
        out.push(DemandSpec {
            id: id.to_string(),
            origin,
            dest,
            depart: depart.round() as u64,
            profile: DriverProfile::default(),
        });
    }
    Ok(Imported { value: out, ignored })
}
