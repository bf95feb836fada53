/** Response payload shapes of the HTTP API consumed by the console. */

export interface LookupMember {
  raw: string;
  count: number;
  distance: number;
}

export interface LookupResponse {
  token: string;
  key: string;
  k: number;
  members: LookupMember[];
}

export interface Candidate {
  word: string;
  distance: number;
  coherency: number;
  corpus_count: number;
}

export type AnnotationStatus = "clean" | "normalized" | "unknown";

export interface Annotation {
  start: number;
  end: number;
  original: string;
  replacement: string | null;
  status: AnnotationStatus;
  candidates: Candidate[];
}

export interface NormalizeResponse {
  output_text: string;
  annotations: Annotation[];
}

export interface Replacement {
  start: number;
  end: number;
  original: string;
  replacement: string;
  bucket_size: number;
}

export interface PerturbResponse {
  output_text: string;
  replacements: Replacement[];
  requested: number;
  achieved: number;
  eligible: number;
  generator: string;
}

export interface TimelineBucket {
  bucket_start: string;
  total: number;
  counts: Record<string, number>;
  mean_sentiment: number | null;
}

export interface TimelineResponse {
  word: string;
  variants: string[];
  granularity: string;
  buckets: TimelineBucket[];
  documents_scanned: number;
  documents_skipped: number;
  warning: string | null;
}

export interface HealthResponse {
  status: string;
  generation: number;
  levels: number[];
  token_count: number;
  bucket_count: number;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
