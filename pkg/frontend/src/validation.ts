/** Client-side search form validation; submits stay disabled while any
 * field has an error, and no request is issued for an invalid form. */

import type { SearchForm } from "./types.js";

export interface FieldErrors {
  terms?: string;
  years?: string;
  sources?: string;
}

export function validateForm(form: SearchForm): FieldErrors {
  const errors: FieldErrors = {};
  if (!form.terms.trim()) {
    errors.terms = "search terms must not be empty";
  }
  const from = parseYear(form.yearFrom);
  const to = parseYear(form.yearTo);
  if (from === null || to === null) {
    errors.years = "years must be four-digit numbers";
  } else if (from > to) {
    errors.years = "the start year must not be after the end year";
  }
  if (form.sources.length === 0) {
    errors.sources = "select at least one source";
  }
  return errors;
}

export function hasErrors(errors: FieldErrors): boolean {
  return Object.keys(errors).length > 0;
}

function parseYear(value: string): number | null {
  const trimmed = value.trim();
  if (!/^\d{4}$/.test(trimmed)) {
    return null;
  }
  return Number(trimmed);
}
