/**
 * Last-write-wins guard for async loads. Each view slot (contributions
 * table, neighbor list, ...) hands out monotonically increasing tokens;
 * a response is applied only if its token is still the slot's newest, so
 * a slow earlier request can never clobber a later one.
 */
export class RequestGate {
  private readonly latest = new Map<string, number>();
  private counter = 0;

  begin(slot: string): number {
    const token = ++this.counter;
    this.latest.set(slot, token);
    return token;
  }

  isCurrent(slot: string, token: number): boolean {
    return this.latest.get(slot) === token;
  }
}
