import { ApiClient } from "./api";
import { mount } from "./app";
import { AppController } from "./controller";
import { flagsFromQuery } from "./flags";

const controller = new AppController(
  new ApiClient(""),
  flagsFromQuery(window.location.search),
);
mount(document.getElementById("app")!, controller);
void controller.boot();
