from pathlib import Path
from agent.graph import build_graph

# To Run: uv run -m tests.visualize_graph
if __name__ == "__main__":
    # Find correct path to save the diagram to
    out_dir = Path(__file__).resolve().parent.parent / "img"
    out_dir.mkdir(exist_ok=True)
    out_file = out_dir / "pipeline.mmd"

    app = build_graph()

    out_file.write_text(app.get_graph().draw_mermaid())
    print(f"Graph saved as {out_file.name}")
