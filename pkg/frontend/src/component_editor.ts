// Component annotator: frames are entered numerically (no CAD kernel to
// pick geometry from); atom pickers fill required/provided intersections.

import type { Atom, ComponentDoc, ConnectionPointDoc } from "./types.js";

export interface PointForm {
  id: string;
  joint: "rigid" | "revolute";
  origin: [number, number, number];
  // yaw about z then an optional z-flip covers the axis-aligned frames the
  // numeric editor supports; arbitrary matrices can be pasted as JSON
  yawDegrees: number;
  zDown: boolean;
  required: string[];
  provided: string[];
}

export interface ComponentForm {
  id: string;
  inherent: string[];
  metadata: Record<string, number>;
  geometryRef?: string;
  points: PointForm[];
}

export function emptyPoint(id: string): PointForm {
  return {
    id,
    joint: "rigid",
    origin: [0, 0, 0],
    yawDegrees: 0,
    zDown: false,
    required: [],
    provided: [],
  };
}

export function rotationMatrix(yawDegrees: number, zDown: boolean): number[][] {
  const rad = (yawDegrees * Math.PI) / 180;
  const c = Math.cos(rad);
  const s = Math.sin(rad);
  // a z-flip is a rotation of pi about x composed with the yaw
  const rows = zDown
    ? [
        [c, s, 0],
        [s, -c, 0],
        [0, 0, -1],
      ]
    : [
        [c, -s, 0],
        [s, c, 0],
        [0, 0, 1],
      ];
  return rows.map((row) => row.map(roundTiny));
}

function roundTiny(v: number): number {
  return Math.abs(v) < 1e-12 ? 0 : v; // also normalizes -0
}

function atoms(names: string[]): Atom[] {
  return names.map((name) => ({ name }));
}

export function buildComponentDoc(form: ComponentForm): ComponentDoc {
  const points: ConnectionPointDoc[] = form.points.map((p) => {
    const doc: ConnectionPointDoc = {
      id: p.id,
      joint: p.joint,
      frame: {
        origin: p.origin,
        rotation: rotationMatrix(p.yawDegrees, p.zDown),
      },
    };
    if (p.required.length > 0) {
      doc.required = atoms(p.required);
    }
    if (p.provided.length > 0) {
      doc.provided = atoms(p.provided);
    }
    return doc;
  });
  const doc: ComponentDoc = {
    id: form.id,
    inherent: atoms(form.inherent),
    metadata: form.metadata,
    connection_points: points,
  };
  if (form.geometryRef) {
    doc.geometry_ref = form.geometryRef;
  }
  return doc;
}

export function formFromDoc(doc: ComponentDoc): ComponentForm {
  return {
    id: doc.id,
    inherent: doc.inherent.map((a) => a.name),
    metadata: { ...doc.metadata },
    geometryRef: doc.geometry_ref,
    points: doc.connection_points.map((p) => ({
      id: p.id,
      joint: p.joint,
      origin: p.frame.origin,
      yawDegrees: yawFromRotation(p.frame.rotation),
      zDown: p.frame.rotation[2][2] < 0,
      required: (p.required ?? []).map((a) => a.name),
      provided: (p.provided ?? []).map((a) => a.name),
    })),
  };
}

function yawFromRotation(rotation: number[][]): number {
  const angle = Math.atan2(rotation[1][0], rotation[0][0]);
  return Math.round((angle * 180) / Math.PI);
}

export function validateForm(form: ComponentForm): string[] {
  const problems: string[] = [];
  if (!form.id) {
    problems.push("component id is required");
  }
  const ids = new Set<string>();
  for (const p of form.points) {
    if (ids.has(p.id)) {
      problems.push(`duplicate connection point id ${p.id}`);
    }
    ids.add(p.id);
    if (p.required.length === 0 && p.provided.length === 0) {
      problems.push(`connection point ${p.id} needs a required or provided type`);
    }
  }
  return problems;
}
