//! File formats: the model JSON interchange format, Max-Cut edge lists, and
//! benchmark trace CSVs.

use qsplit::bench::{read_trace_csv, rows_from_trace, write_trace_csv};
use qsplit::instances::{parse_maxcut_edgelist, random_maxcut, to_maxcut_edgelist};
use qsplit::ising::IsingModel;
use qsplit::rng::stream_rng;
use qsplit::splitting::{Trace, TraceRow};

fn main() -> qsplit::Result<()> {
    let model = IsingModel::from_dense(
        &[vec![0.0, -1.0], vec![-1.0, 0.0]],
        vec![0.25, 0.0],
        1.5,
    )?;
    let json = model.to_json();
    println!("{json}");
    let back = IsingModel::from_json(&json)?;
    assert_eq!(back.b(), model.b());

    let mut rng = stream_rng(4, 0);
    let g = random_maxcut(6, 0.5, 5, &mut rng)?;
    let text = to_maxcut_edgelist(&g);
    print!("{text}");
    let reparsed = parse_maxcut_edgelist(&text)?;
    assert_eq!(reparsed.edges(), g.edges());

    let mut trace = Trace::new();
    trace.push(TraceRow {
        iteration: 0,
        subiteration: 0,
        lambda: None,
        energy: -1.0,
        best_energy: -1.0,
        wall_ms: 0.0,
    });
    trace.push(TraceRow {
        iteration: 1,
        subiteration: 0,
        lambda: Some(0.5),
        energy: -2.0,
        best_energy: -2.0,
        wall_ms: 1.25,
    });
    let rows = rows_from_trace("demo", "splitting", 7, &trace);
    let dir = std::env::temp_dir().join("qsplit_serialization_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("trace.csv");
    write_trace_csv(&path, &rows)?;
    println!("{}", std::fs::read_to_string(&path)?);
    assert_eq!(read_trace_csv(&path)?.len(), 2);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
