use std::io::Write;

use super::{NodeCentrality, Partition, SemanticNetwork, SemnetError};

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// GEXF 1.2 document with per-node community, weighted degree,
/// eigencentrality, triangles and degree attributes, and edge weights.
/// `centralities` and `partition` must be aligned with the network's nodes.
pub fn write_gexf<W: Write>(
    mut out: W,
    net: &SemanticNetwork,
    centralities: &[NodeCentrality],
    partition: &Partition,
) -> Result<(), SemnetError> {
    if centralities.len() != net.node_count() || partition.communities.len() != net.node_count() {
        return Err(SemnetError::Input(
            "node attributes do not match the network".into(),
        ));
    }
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2">"#
    )?;
    writeln!(
        out,
        r#"  <graph mode="static" defaultedgetype="undirected">"#
    )?;
    writeln!(out, r#"    <attributes class="node">"#)?;
    for (id, title, ty) in [
        (0, "community", "integer"),
        (1, "weighted_degree", "long"),
        (2, "eigencentrality", "double"),
        (3, "triangles", "long"),
        (4, "degree", "integer"),
    ] {
        writeln!(
            out,
            r#"      <attribute id="{id}" title="{title}" type="{ty}"/>"#
        )?;
    }
    writeln!(out, "    </attributes>")?;
    writeln!(out, "    <nodes>")?;
    for (i, (label, c)) in net.nodes().iter().zip(centralities).enumerate() {
        writeln!(
            out,
            r#"      <node id="{i}" label="{}">"#,
            xml_escape(label)
        )?;
        writeln!(out, "        <attvalues>")?;
        for (id, value) in [
            (0, partition.communities[i].to_string()),
            (1, c.weighted_degree.to_string()),
            (2, c.eigencentrality.to_string()),
            (3, c.triangles.to_string()),
            (4, c.degree.to_string()),
        ] {
            writeln!(out, r#"          <attvalue for="{id}" value="{value}"/>"#)?;
        }
        writeln!(out, "        </attvalues>")?;
        writeln!(out, "      </node>")?;
    }
    writeln!(out, "    </nodes>")?;
    writeln!(out, "    <edges>")?;
    for (i, e) in net.edges().iter().enumerate() {
        writeln!(
            out,
            r#"      <edge id="{i}" source="{}" target="{}" weight="{}"/>"#,
            e.u, e.v, e.weight
        )?;
    }
    writeln!(out, "    </edges>")?;
    writeln!(out, "  </graph>")?;
    writeln!(out, "</gexf>")?;
    Ok(())
}

/// `source,target,weight` with node labels.
pub fn write_edge_csv<W: Write>(out: W, net: &SemanticNetwork) -> Result<(), SemnetError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["source", "target", "weight"])?;
    for e in net.edges() {
        w.write_record([&net.nodes()[e.u], &net.nodes()[e.v], &e.weight.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_centralities_csv<W: Write>(
    out: W,
    centralities: &[NodeCentrality],
    partition: Option<&Partition>,
) -> Result<(), SemnetError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "node",
        "degree",
        "weighted_degree",
        "eigencentrality",
        "triangles",
        "community",
    ])?;
    for (i, c) in centralities.iter().enumerate() {
        w.write_record([
            c.node.clone(),
            c.degree.to_string(),
            c.weighted_degree.to_string(),
            c.eigencentrality.to_string(),
            c.triangles.to_string(),
            partition.map_or(String::new(), |p| p.communities[i].to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
