// Thin fetch wrappers for the /api/v1 endpoints. One in-flight request per
// endpoint: a newer call aborts the previous one, so stale responses can
// never overwrite fresh renders.

import type {
  DeathsArtifact,
  DesignDocument,
  GuidelineArtifact,
  OcArtifact,
  ServiceErrorBody,
  SimulateArtifact,
} from "./types.js";

declare global {
  interface Window {
    OSMON_API_BASE?: string;
  }
}

export class ServiceError extends Error {
  code: string;
  fieldPath: string | undefined;

  constructor(body: ServiceErrorBody) {
    super(body.message);
    this.code = body.code;
    this.fieldPath = body.field_path;
  }
}

function base(): string {
  return typeof window !== "undefined" ? (window.OSMON_API_BASE ?? "") : "";
}

const inflight = new Map<string, AbortController>();

async function post<T>(endpoint: string, doc: DesignDocument, query = ""): Promise<T> {
  inflight.get(endpoint)?.abort();
  const ctl = new AbortController();
  inflight.set(endpoint, ctl);
  const res = await fetch(`${base()}/api/v1/${endpoint}${query}`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(doc),
    signal: ctl.signal,
  });
  const data = (await res.json()) as T | ServiceErrorBody;
  if (!res.ok) throw new ServiceError(data as ServiceErrorBody);
  return data as T;
}

export function fetchGuideline(doc: DesignDocument): Promise<GuidelineArtifact> {
  return post("guideline", doc);
}

export function fetchOc(doc: DesignDocument): Promise<OcArtifact> {
  return post("oc", doc);
}

export function fetchDeaths(
  doc: DesignDocument,
  horizonMonths?: number,
  stepMonths?: number,
): Promise<DeathsArtifact> {
  const params = new URLSearchParams();
  if (horizonMonths !== undefined) params.set("horizon_months", String(horizonMonths));
  if (stepMonths !== undefined) params.set("step_months", String(stepMonths));
  const q = params.size > 0 ? `?${params}` : "";
  return post("deaths", doc, q);
}

export function fetchSimulate(doc: DesignDocument): Promise<SimulateArtifact> {
  return post("simulate", doc);
}

export function fetchHealth(): Promise<{ status: string; version: string }> {
  return fetch(`${base()}/api/v1/health`).then((r) => r.json());
}

/** True for the aborts produced by latest-wins cancellation. */
export function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}
