/** Pure assignment state transitions.
 *
 * The assignment is a boolean per segment, indexed by position in the
 * server's segment list.  Toggles are involutive XORs, so any permutation
 * of a fixed multiset of toggle actions lands in the same state; the
 * shortcuts overwrite everything.  Reducers return fresh arrays so
 * optimistic snapshots stay valid.
 */

import type { Action } from "./types";

export function initialAssignment(nSegments: number): boolean[] {
  return new Array<boolean>(nSegments).fill(false);
}

export function applyAction(assignment: boolean[], action: Action): boolean[] {
  switch (action.kind) {
    case "toggle": {
      if (action.index < 0 || action.index >= assignment.length) {
        throw new RangeError(`segment index ${action.index} out of range`);
      }
      const next = assignment.slice();
      next[action.index] = !next[action.index];
      return next;
    }
    case "all_on":
      return assignment.map(() => true);
    case "all_off":
      return assignment.map(() => false);
  }
}

export function applyAll(assignment: boolean[], actions: Action[]): boolean[] {
  return actions.reduce(applyAction, assignment);
}
