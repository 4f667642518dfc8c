"""Regenerates the bundled toy instances.

Each mirror is a connected random hypergraph with the agent count, task count
and number of unit incidences of one collaboration snapshot. Budgets and
energies are the marginals, so every mirror is exactly feasible.

    python3 data/generate_mirrors.py
"""

import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent


def connected_incidence(n_agents, n_tasks, units, rng):
    pairs = set()
    # Spanning tree over agents and tasks first, then random fill.
    nodes = [("a", i) for i in range(n_agents)] + [("t", k) for k in range(n_tasks)]
    rng.shuffle(nodes)
    first_task = next(n for n in nodes if n[0] == "t")
    placed_agents, placed_tasks = [], [first_task[1]]
    for kind, idx in nodes:
        if (kind, idx) == first_task:
            continue
        if kind == "a":
            pairs.add((idx, rng.choice(placed_tasks)))
            placed_agents.append(idx)
        else:
            if not placed_agents:
                placed_agents.append(rng.randrange(n_agents))
            pairs.add((rng.choice(placed_agents), idx))
            placed_tasks.append(idx)
    while len(pairs) < units:
        pairs.add((rng.randrange(n_agents), rng.randrange(n_tasks)))
    return sorted(pairs)


def write_json(path, n_agents, n_tasks, pairs):
    budget = [0] * n_agents
    energy = [0] * n_tasks
    for i, k in pairs:
        budget[i] += 1
        energy[k] += 1
    doc = {
        "agents": [{"id": f"author{i:03d}", "budget": budget[i]} for i in range(n_agents)],
        "tasks": [{"id": f"paper{k:03d}", "energy": energy[k]} for k in range(n_tasks)],
        "assignment": [{"agent": f"author{i:03d}", "task": f"paper{k:03d}", "weight": 1} for i, k in pairs],
    }
    path.write_text(json.dumps(doc, indent=1) + "\n")


def write_edge_list(path, n_tasks, pairs, header):
    members = {k: [] for k in range(n_tasks)}
    for i, k in pairs:
        members[k].append(i)
    lines = [f"# {header}"]
    for k in range(n_tasks):
        lines.append(f"p{k:04d}: " + " ".join(f"u{i:04d}" for i in members[k]))
    path.write_text("\n".join(lines) + "\n")


def main():
    aps = connected_incidence(52, 25, 180, random.Random(1993))
    write_json(HERE / "aps_1993_1994.json", 52, 25, aps)
    mag = connected_incidence(781, 704, 11737, random.Random(2015))
    write_edge_list(HERE / "mag_hypergraph.edgelist", 704, mag, "toy mirror: 781 authors, 704 papers")


if __name__ == "__main__":
    main()
