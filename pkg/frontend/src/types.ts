// Wire types mirroring the service JSON schemas.

export interface Prop {
  key: string;
  value: number;
}

export interface Atom {
  name: string;
  prop?: Prop;
}

export type AggregateOp = "eq" | "le";
export type FilterOp = "eq" | "le" | "ge";

export interface Aggregate {
  key: string;
  op: AggregateOp;
  target: number;
}

export interface BomFilter {
  key: string;
  op: FilterOp;
  target: number;
}

export interface RequestDoc {
  goal: Atom[];
  aggregates: Aggregate[];
  max_size: number;
  max_results: number;
  filters?: BomFilter[];
}

export interface TaxonomyDoc {
  name: string;
  nodes: string[];
  edges: [string, string][];
}

export interface Frame {
  origin: [number, number, number];
  rotation: number[][];
}

export interface ConnectionPointDoc {
  id: string;
  joint: "rigid" | "revolute";
  frame: Frame;
  required?: Atom[];
  provided?: Atom[];
}

export interface ComponentDoc {
  id: string;
  inherent: Atom[];
  metadata: Record<string, number>;
  geometry_ref?: string;
  connection_points: ConnectionPointDoc[];
}

export interface Count {
  kind: "finite" | "infinite" | "at_least";
  value?: number;
}

export interface Bom {
  lines: Record<string, number>;
  totals: Record<string, number>;
}

export interface TermDoc {
  combinator: string;
  args: TermDoc[];
}

export interface ResultRow {
  index: number;
  term: TermDoc;
  size: number;
  bom: Bom;
}

export interface ResultsPage {
  page: number;
  page_size: number;
  total: number;
  count: Count;
  truncated: boolean;
  rows: ResultRow[];
}

export interface RequestStatus {
  id: string;
  status: "queued" | "solving" | "done" | "failed";
  taxonomy_rev: number;
  catalog_rev: number;
  request?: RequestDoc;
  summary?: {
    count: Count;
    returned: number;
    truncated: boolean;
    timings_ms: Record<string, number>;
  };
  error?: string;
}

export interface Project {
  id: string;
  taxonomy_rev: number;
  catalog_rev: number;
}

export interface ScenePose {
  rotation: number[][];
  translation: [number, number, number];
}

export interface SceneInstance {
  id: string;
  component: string;
  pose: ScenePose;
}

export interface SceneJoint {
  parent: string;
  child: string;
  kind: "rigid" | "revolute";
  axis?: [number, number, number];
}

export interface SceneDoc {
  instances: SceneInstance[];
  links: string[][];
  groups: Record<string, string[]>;
  joints: SceneJoint[];
}
